pub mod almost;
pub mod counterexample;
pub mod gaction;
pub mod ggraph;
pub mod io;
pub mod random;
pub mod retract;
pub mod stallings;
pub mod words;
