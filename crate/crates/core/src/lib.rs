pub mod fixpoint;
pub mod kripke;
pub mod report;
pub mod smorynski;
pub mod syntax;
pub mod verify;
