# Numerical kernels
