# specdisp
# Spectral dispersion laws and periodic-potential solvers
