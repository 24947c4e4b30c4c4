//! Numerical thresholds used across the crate.
//!
//! Every threshold has a default; [`Tolerances::from_env`] lets a caller
//! override any of them through `SEQMETRO_TOL_<NAME>` environment variables,
//! where `<NAME>` is the upper-cased field name (for example
//! `SEQMETRO_TOL_PERIPHERAL=1e-8`).

/// Prefix of the environment variables read by [`Tolerances::from_env`].
pub const ENV_PREFIX: &str = "SEQMETRO_TOL_";

#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    /// Relative distance below which eigenvalues are treated as one cluster.
    pub eig_cluster: f64,
    /// Hermiticity / unitarity / trace-preservation checks on constructed objects.
    pub structure: f64,
    /// Most negative Choi eigenvalue accepted for untrusted channels.
    pub choi_psd: f64,
    /// `1 - |λ|` at or below which an eigenvalue is peripheral.
    pub peripheral: f64,
    /// `1 - |λ|` below which a non-peripheral eigenvalue triggers a warning.
    pub near_peripheral: f64,
    /// `|λ - 1|` at or below which an eigenvalue counts as a fixed point.
    pub fixed_point: f64,
    /// `p_i + p_j` at or below which a pair lies outside the state's support.
    pub sld_support: f64,
    /// Weight of `ρ̇` in the kernel of `ρ` that is reported as rank deficient.
    pub rank_leak: f64,
    /// `|λ̇|` above which a peripheral eigenvalue derivative is nonzero.
    pub nonzero_derivative: f64,
    /// Largest off-diagonal Gram entry accepted as orthogonal.
    pub gram_orthogonal: f64,
    /// N² coefficient above which the Heisenberg limit is reported.
    pub hl_threshold: f64,
    /// Smallest eigenvalue kept when building witness input states.
    pub psd_margin: f64,
    /// Norm above which the signal operator counts as non-vanishing.
    pub signal: f64,
    /// Relative commutator norm accepted as normal.
    pub normality: f64,
    /// Relative least-squares residual accepted as "in span".
    pub span_residual: f64,
    /// Absolute gap for grouping eigenvalues and singular values into subspaces.
    pub subspace_group: f64,
    /// Singular values above this are nonzero (and `|s - 1|` above it nonunity).
    pub singular_nonzero: f64,
    /// Relative residual of the unitary equivalence sanity check.
    pub sanity: f64,
    /// Round cap of the subspace refinement loop.
    pub refine_max_rounds: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eig_cluster: 1e-8,
            structure: 1e-10,
            choi_psd: 1e-9,
            peripheral: 1e-9,
            near_peripheral: 1e-4,
            fixed_point: 1e-9,
            sld_support: 1e-10,
            rank_leak: 1e-7,
            nonzero_derivative: 1e-10,
            gram_orthogonal: 1e-8,
            hl_threshold: 1e-10,
            psd_margin: 1e-6,
            signal: 1e-9,
            normality: 1e-8,
            span_residual: 1e-8,
            subspace_group: 1e-8,
            singular_nonzero: 1e-9,
            sanity: 1e-8,
            refine_max_rounds: 64,
        }
    }
}

impl Tolerances {
    /// Defaults overridden by any `SEQMETRO_TOL_*` variables that are set.
    ///
    /// Unparsable values are returned as an error naming the variable.
    pub fn from_env() -> Result<Self, String> {
        Self::from_lookup(|key| std::env::var(key).ok())
    }

    pub fn from_lookup(lookup: impl Fn(&str) -> Option<String>) -> Result<Self, String> {
        let mut tol = Self::default();
        macro_rules! read {
            ($($field:ident),*) => {
                $(
                    let key = format!("{}{}", ENV_PREFIX, stringify!($field).to_uppercase());
                    if let Some(raw) = lookup(&key) {
                        tol.$field = raw
                            .trim()
                            .parse()
                            .map_err(|_| format!("{key}: cannot parse {raw:?}"))?;
                    }
                )*
            };
        }
        read!(
            eig_cluster,
            structure,
            choi_psd,
            peripheral,
            near_peripheral,
            fixed_point,
            sld_support,
            rank_leak,
            nonzero_derivative,
            gram_orthogonal,
            hl_threshold,
            psd_margin,
            signal,
            normality,
            span_residual,
            subspace_group,
            singular_nonzero,
            sanity,
            refine_max_rounds
        );
        Ok(tol)
    }
}
