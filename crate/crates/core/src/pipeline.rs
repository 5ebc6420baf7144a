//! The full solve: refine, validate, build the surface, compute Σ, search for the rim
//! and reconstruct.

use thiserror::Error;

use crate::geodesic::{all_pairs, all_pairs_oracle, default_depth_cap, GeodesicError};
use crate::gluing::{check_alexandrov, refine, GluingError};
use crate::layout::{reconstruct, LayoutError};
use crate::rim::{find_rim, RimSearch};
use crate::surface::SurfaceError;
use crate::{FlatPolyhedron, GluingSpec, RefinedGluing, ShortestPathSet, Surface, Tolerances, ValidationReport};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("gluing: {0}")]
    Gluing(#[from] GluingError),
    #[error("gluing: instance fails the gluing conditions")]
    Invalid(Box<ValidationReport>),
    #[error("surface: {0}")]
    Surface(#[from] SurfaceError),
    #[error("geodesic: {0}")]
    Geodesic(#[from] GeodesicError),
    #[error("layout: {0}")]
    Layout(#[from] LayoutError),
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SolveOptions {
    pub tolerances: Tolerances,
    /// Compute Σ with the exhaustive oracle instead of window propagation.
    pub oracle: bool,
    /// Cone index the rim search starts from.
    pub first: usize,
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub tolerances: Tolerances,
    pub refined: RefinedGluing,
    pub surface: Surface,
    pub sigma: ShortestPathSet,
    pub search: RimSearch,
    /// `None` when no rim exists.
    pub flat: Option<FlatPolyhedron>,
}

impl SolveOutcome {
    pub fn is_flat(&self) -> bool {
        self.flat.is_some()
    }
}

/// Refines and validates without building the surface.
pub fn check(spec: &GluingSpec, tol: &Tolerances) -> Result<(RefinedGluing, ValidationReport), GluingError> {
    let r = refine(spec, tol)?;
    let report = check_alexandrov(&r);
    Ok((r, report))
}

pub fn solve(spec: &GluingSpec, opts: &SolveOptions) -> Result<SolveOutcome, SolveError> {
    let (refined, report) = check(spec, &opts.tolerances)?;
    if !report.all_pass() {
        return Err(SolveError::Invalid(Box::new(report)));
    }
    let surface = Surface::build(&refined)?;
    let sigma =
        if opts.oracle { all_pairs_oracle(&surface, default_depth_cap(&surface))? } else { all_pairs(&surface)? };
    let search = find_rim(&surface, &sigma, opts.first);
    let flat = match &search.rim {
        Some(rim) => Some(reconstruct(&surface, &sigma, rim)?),
        None => None,
    };
    Ok(SolveOutcome { tolerances: opts.tolerances, refined, surface, sigma, search, flat })
}
