pub mod cell2;
pub mod cover;
pub mod csscode;
pub mod f2la;
pub mod gadget;
pub mod simproto;
