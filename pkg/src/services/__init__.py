# Numerical services for specdisp
