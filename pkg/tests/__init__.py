# Test package for specdisp
