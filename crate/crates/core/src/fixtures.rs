//! The bundled seminar enrolment process.

use crate::formats::scdl::parse_scdl;
use crate::model::Statechart;

pub const SEMINAR_SCDL: &str = include_str!("../fixtures/seminar.scdl");
pub const SEMINAR_XMI: &str = include_str!("../fixtures/seminar.xmi");
pub const SEMINAR_FEATURE: &str = include_str!("../fixtures/seminar.feature");

pub fn seminar() -> Statechart {
    parse_scdl(SEMINAR_SCDL).expect("bundled fixture is valid")
}
