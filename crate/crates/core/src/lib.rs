pub mod citations;
pub mod cli;
pub mod frobdelta;
pub mod ideals;
pub mod oracle;
pub mod polyring;
pub mod splitting;
pub mod verdicts;
