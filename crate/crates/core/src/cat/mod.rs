//! Categories the workbench computes over.

pub mod category;
pub mod cofib;
pub mod cube;
pub mod internal;
pub mod lattice;
pub mod site;

pub use category::{enumerate_homs, parse_category, Cat, Mor, Obj};
pub use cofib::{parse_cofibration, Cofibration, Face};
pub use cube::{box_category, check_interval_representable, CubeCategory, CubeMap};
pub use internal::{parse_internal_category, Functor, InternalCategory};
pub use lattice::{dl_normalize, DlTerm, IntervalElement};
pub use site::{grothendieck, plain_site, Site};
