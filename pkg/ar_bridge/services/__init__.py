# Numerical services: numerics, processes, fits, criteria, experiments and prequential runs
