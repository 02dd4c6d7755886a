# Utility functions for specdisp
