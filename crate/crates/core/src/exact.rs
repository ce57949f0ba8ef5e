//! Model-based block-coordinate policy evaluation and policy iteration.
