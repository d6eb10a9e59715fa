//! Global actions over finite commutative rings.
//!
//! The crate builds the unimodular-row action `Um_n(R)`, its universal cover
//! `E_n(R)/(EP_n(R))_2`, fundamental groups by two independent routes, and the
//! low-dimensional exact sequence relating `pi_0`, `pi_1` and `K_1`.

pub mod action;
pub mod covering;
pub mod group;
pub mod kstab;
pub mod matgroup;
pub mod path;
pub mod presentation;
pub mod ring;
pub mod steinberg;
pub mod unimodular;

pub use matgroup::{elementary, Matrix, NilpotentSet, SubgroupClosure};
pub use ring::{Code, FiniteRing, RingElem, RingError};
