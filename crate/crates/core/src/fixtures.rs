//! The example models shipped with the crate, as source text.

pub const TEMPERATURE: &str = include_str!("../examples/temperature.ccm");
pub const CHOLESTEROL: &str = include_str!("../examples/cholesterol.ccm");
pub const GEOMETRY: &str = include_str!("../examples/geometry.ccm");
pub const TINY: &str = include_str!("../examples/tiny.ccm");

/// Lines of `model | context | formula | expected` over the models above.
pub const QUERIES: &str = include_str!("../examples/queries.txt");

/// An instance of the classic D9 that fails once constraints can exclude every solution.
pub const OLD_D9_INSTANCE: &str = include_str!("../examples/old-d9-instance.cf");

/// The model source for a name used in [`QUERIES`].
pub fn by_name(name: &str) -> Option<&'static str> {
    match name {
        "temperature" => Some(TEMPERATURE),
        "cholesterol" => Some(CHOLESTEROL),
        "geometry" => Some(GEOMETRY),
        "tiny" => Some(TINY),
        _ => None,
    }
}
