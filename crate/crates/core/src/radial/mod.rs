//! Radial profiles, piecewise radial maps built from annular packings, and
//! the inverse problem recovering a profile from a radial Beltrami
//! coefficient.

mod alpha;
mod fill;
mod packing;
mod profile;

pub use alpha::{alpha_of, rho_from_alpha, RadialCoefficient};
pub use fill::{fill_apk, FillReport};
pub use packing::{
    annulus_energy, build_packing, random_packing, ClassTags, ClassTarget, Domain, KindSpec, MapField, NodeSpec,
    PackingNode, PackingSpec, PiecewiseRadialMap, Region,
};
pub use profile::{
    classify_profile, closed_form_energy, radial_deriv, OriginLimit, ProfileClassification, ProfileFn, ProfileKind,
    RadialEnergy, RadialProfile,
};
