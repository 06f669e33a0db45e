//! Orbits of the family: point and disk classification, traps, periodic
//! cycles and post-critically finite parameters.

mod cycle;
mod disk_class;
mod family;
mod orbit;
mod parameter;
mod pcf;
mod trap;

pub use cycle::{
    find_cycle_hensel, hensel_root, multiplier, period_polynomial, CycleRecord, HenselRoot,
    Multiplier, Nature,
};
pub use disk_class::{
    classify_disk, classify_parameter_disk, escape_search, first_critical_image, trap_search,
    DiskClass, DiskOptions, EscapeCertificate, TrapEntry,
};
pub use family::{
    escape_certified, family_c2_image, family_disk_map, family_q2_image, replay_disk_map,
    ParamScope,
};
pub use orbit::{
    classify_point_orbit, Iterate, OrbitClass, OrbitOptions, PointReport, ORBIT_LOG_LIMIT,
};
pub use parameter::{classify_parameter, ParameterLabel, ParameterReport, ParameterRoute};
pub use pcf::{family_eval_ball, pcf_parameter, PcfParameter};
pub use trap::{
    certify_chain, certify_entry_path, certify_trap_cycle, standard_trap, FieldScope,
    TrapCertificate, TrapLibrary,
};
