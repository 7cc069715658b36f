# Unit tests for the dugks solver.
