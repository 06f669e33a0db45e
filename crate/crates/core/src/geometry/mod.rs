//! Disks in `Q_2`, images of disks under polynomials, Newton polygons, and
//! the forward-difference test for polynomial congruences on `Z_2`.

mod disk;
mod image;
mod mahler;
mod newton;

pub use disk::Disk;
pub use image::{disk_image, disk_sup_norm, DiskImage, ImageScope};
pub use mahler::{
    forward_difference_valuations, min_val_on_z2, pullback, q2_image, residue_disk_map,
    z2_congruence_check, CertificateKind, CongruenceCheck, DiskMapCertificate, Verdict, Witness,
};
pub use newton::{newton_polygon, NewtonPolygon, Segment};
