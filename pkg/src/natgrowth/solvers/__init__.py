"""Linear, variational, path-following and bracketed solvers."""
