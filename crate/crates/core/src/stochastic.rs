//! Model-free stochastic solvers and tabular baselines.
