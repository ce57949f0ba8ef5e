//! Finite-horizon MDP model and exact dynamic-programming oracles.
