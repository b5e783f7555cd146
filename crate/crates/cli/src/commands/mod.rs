pub mod contact;
pub mod family;
pub mod map;
pub mod qd;
