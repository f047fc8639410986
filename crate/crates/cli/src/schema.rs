//! JSON schemas for every report, shipped with the binary.

pub const FAMILY_SHOW: &str = include_str!("../schemas/family_show.schema.json");
pub const GEOMETRY_SHOW: &str = include_str!("../schemas/geometry_show.schema.json");
pub const SPIN_TABLE: &str = include_str!("../schemas/spin_table.schema.json");
pub const SPIN_QMATRIX: &str = include_str!("../schemas/spin_qmatrix.schema.json");
pub const OSCILLATOR_SHOW: &str = include_str!("../schemas/oscillator_show.schema.json");
pub const VERIFY: &str = include_str!("../schemas/verify.schema.json");

/// Schema text for a report's `command` value, or for a verify report when
/// `command` is absent.
pub fn for_command(command: Option<&str>) -> Option<&'static str> {
    Some(match command {
        Some("family show") => FAMILY_SHOW,
        Some("geometry show") => GEOMETRY_SHOW,
        Some("spin table") => SPIN_TABLE,
        Some("spin qmatrix") => SPIN_QMATRIX,
        Some("oscillator show") => OSCILLATOR_SHOW,
        None => VERIFY,
        Some(_) => return None,
    })
}
