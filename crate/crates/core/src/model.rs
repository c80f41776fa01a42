//! Structure and dispersion parameter types, and the builders that resolve
//! them into explicit layer sequences.
//!
//! Two chirp conventions appear in the chirped-poling literature and both are
//! supported here, documented where they meet:
//!
//! * the *engine* convention, used by [`build_aperiodic`]: layer `m` has
//!   length `l0 + (m-1)*zeta`, so the first layer has length `l0`;
//! * the *caption* convention, used by [`solve_l0`]: layer `n` has length
//!   `l0 + n*zeta`, so the total length is `N*l0 + zeta*N*(N+1)/2`. Published
//!   parameter sets for fixed total length resolve `l0` this way.

use crate::error::{Error, Result};

/// Default susceptibility scale. Densities are normalized, so the absolute
/// scale only matters for explicit stacks mixing different |chi|.
pub const DEFAULT_CHI0: f64 = 1.0;

fn require_finite(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be finite, got {v}")))
    }
}

/// First-order dispersion data: pump wavelength, walk-off, central mismatch.
///
/// `b_walkoff` is the dimensionless product of the vacuum light speed and the
/// group-velocity difference of the down-converted modes; it converts a
/// frequency detuning `omega/c` (um^-1) into a phase-mismatch shift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionParams {
    /// Pump wavelength, um.
    pub lambda0: f64,
    /// Dimensionless walk-off B = c * (k'_s - k'_i).
    pub b_walkoff: f64,
    /// Central phase mismatch at degeneracy, um^-1.
    pub dk0: f64,
}

impl DispersionParams {
    pub fn new(lambda0: f64, b_walkoff: f64, dk0: f64) -> Result<Self> {
        let d = DispersionParams {
            lambda0,
            b_walkoff,
            dk0,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        require_finite("lambda0", self.lambda0)?;
        require_finite("b_walkoff", self.b_walkoff)?;
        require_finite("dk0", self.dk0)?;
        if self.lambda0 <= 0.0 {
            return Err(Error::invalid("lambda0", "pump wavelength must be > 0"));
        }
        if self.b_walkoff == 0.0 {
            // B = 0 collapses the frequency -> mismatch map.
            return Err(Error::invalid("b_walkoff", "walk-off must be nonzero"));
        }
        Ok(())
    }

    /// Pump wavenumber omega0/c = 2*pi/lambda0, um^-1.
    pub fn pump_omega_over_c(&self) -> f64 {
        std::f64::consts::TAU / self.lambda0
    }
}

/// Photonic-type stack: equal layer lengths, equal susceptibility, and a
/// linear spatial chirp of the per-layer phase mismatch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonicChirpSpec {
    pub n_layers: usize,
    /// Layer length l, um.
    pub layer_len: f64,
    /// Susceptibility scale chi0.
    pub chi0: f64,
    /// Spatial chirp alpha, um^-2; layer m sees mismatch dk - alpha*(m-1)*l.
    pub alpha: f64,
}

impl PhotonicChirpSpec {
    pub fn new(n_layers: usize, layer_len: f64, chi0: f64, alpha: f64) -> Result<Self> {
        let s = PhotonicChirpSpec {
            n_layers,
            layer_len,
            chi0,
            alpha,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_layers == 0 {
            return Err(Error::invalid("n_layers", "need at least one layer"));
        }
        require_finite("layer_len", self.layer_len)?;
        require_finite("chi0", self.chi0)?;
        require_finite("alpha", self.alpha)?;
        if self.layer_len <= 0.0 {
            return Err(Error::invalid("layer_len", "layer length must be > 0"));
        }
        Ok(())
    }

    /// Total stack length L = N*l, um.
    pub fn total_len(&self) -> f64 {
        self.n_layers as f64 * self.layer_len
    }
}

/// Linear refractive-index chirp of pump and subharmonic waves. Only the
/// slopes enter the spatial chirp parameter; the base indices are kept so a
/// stack can be checked for physical (positive-index) depth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexChirpSpec {
    /// Index slope of the pump, um^-1.
    pub beta0: f64,
    /// Index slope of the signal, um^-1.
    pub beta_s: f64,
    /// Index slope of the idler, um^-1.
    pub beta_i: f64,
    pub n0: f64,
    pub n_s: f64,
    pub n_i: f64,
}

impl IndexChirpSpec {
    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("beta0", self.beta0),
            ("beta_s", self.beta_s),
            ("beta_i", self.beta_i),
            ("n0", self.n0),
            ("n_s", self.n_s),
            ("n_i", self.n_i),
        ] {
            require_finite(field, v)?;
        }
        if self.n0 <= 0.0 || self.n_s <= 0.0 || self.n_i <= 0.0 {
            return Err(Error::invalid("n0/n_s/n_i", "base indices must be > 0"));
        }
        Ok(())
    }

    /// All three indices stay positive over an N-layer stack of layer length l.
    pub fn indices_positive_over(&self, n_layers: usize, layer_len: f64) -> bool {
        let drop = (n_layers.saturating_sub(1)) as f64 * layer_len;
        self.n0 - drop * self.beta0 > 0.0
            && self.n_s - drop * self.beta_s > 0.0
            && self.n_i - drop * self.beta_i > 0.0
    }
}

/// Aperiodically poled stack: alternating-sign susceptibility with layer
/// lengths growing linearly by `zeta` per layer (engine convention).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AperiodicPolingSpec {
    pub n_layers: usize,
    /// First-layer length l0, um.
    pub l0: f64,
    /// Length increment per layer zeta, um.
    pub zeta: f64,
    pub chi0: f64,
}

impl AperiodicPolingSpec {
    pub fn new(n_layers: usize, l0: f64, zeta: f64, chi0: f64) -> Result<Self> {
        let s = AperiodicPolingSpec {
            n_layers,
            l0,
            zeta,
            chi0,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_layers == 0 {
            return Err(Error::invalid("n_layers", "need at least one layer"));
        }
        require_finite("l0", self.l0)?;
        require_finite("zeta", self.zeta)?;
        require_finite("chi0", self.chi0)?;
        if self.l0 <= 0.0 {
            return Err(Error::invalid("l0", "first-layer length must be > 0"));
        }
        // With zeta < 0 the shortest layer is the last one.
        let last = self.layer_len(self.n_layers);
        if last <= 0.0 {
            return Err(Error::invalid(
                "zeta",
                format!(
                    "layer {} has nonpositive length {last}",
                    self.n_layers
                ),
            ));
        }
        Ok(())
    }

    /// Length of layer m (1-based): l0 + (m-1)*zeta.
    pub fn layer_len(&self, m: usize) -> f64 {
        self.l0 + (m as f64 - 1.0) * self.zeta
    }

    /// Total length N*l0 + zeta*N*(N-1)/2, um.
    pub fn total_len(&self) -> f64 {
        let n = self.n_layers as f64;
        n * self.l0 + self.zeta * n * (n - 1.0) / 2.0
    }

    /// Shortest and longest layer in the stack.
    pub fn layer_len_range(&self) -> (f64, f64) {
        let a = self.layer_len(1);
        let b = self.layer_len(self.n_layers);
        (a.min(b), a.max(b))
    }
}

/// One resolved layer: length, susceptibility, and an additive offset to the
/// global phase mismatch inside this layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layer {
    /// Length, um.
    pub length: f64,
    /// Susceptibility (signed).
    pub chi: f64,
    /// Additive mismatch offset, um^-1.
    pub dk_offset: f64,
}

/// Resolved, validated list of layers; the input the generic amplitude
/// engine works on.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerSequence {
    layers: Vec<Layer>,
}

impl LayerSequence {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::invalid("layers", "layer list must be non-empty"));
        }
        for (i, layer) in layers.iter().enumerate() {
            require_finite("length", layer.length)?;
            require_finite("chi", layer.chi)?;
            require_finite("dk_offset", layer.dk_offset)?;
            if layer.length <= 0.0 {
                return Err(Error::invalid(
                    "length",
                    format!("layer {} has nonpositive length {}", i + 1, layer.length),
                ));
            }
        }
        Ok(LayerSequence { layers })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    /// Sum of layer lengths, um.
    pub fn total_length(&self) -> f64 {
        self.layers.iter().map(|l| l.length).sum()
    }

    /// Susceptibility scale used for normalization: max |chi| over layers.
    pub fn chi_ref(&self) -> f64 {
        self.layers
            .iter()
            .map(|l| l.chi.abs())
            .fold(0.0, f64::max)
    }

    /// Longest layer, um.
    pub fn max_layer_len(&self) -> f64 {
        self.layers
            .iter()
            .map(|l| l.length)
            .fold(0.0, f64::max)
    }
}

/// Resolve a photonic chirp spec into layers: N equal layers of length l and
/// susceptibility chi0, with dk_offset_m = -alpha*(m-1)*l.
pub fn build_photonic(spec: &PhotonicChirpSpec) -> Result<LayerSequence> {
    spec.validate()?;
    let l = spec.layer_len;
    let layers = (0..spec.n_layers)
        .map(|j| Layer {
            length: l,
            chi: spec.chi0,
            dk_offset: -spec.alpha * j as f64 * l,
        })
        .collect();
    LayerSequence::new(layers)
}

/// Resolve an aperiodic poling spec into layers: length l0 + (m-1)*zeta and
/// alternating susceptibility (-1)^(m-1)*chi0, no mismatch offsets.
pub fn build_aperiodic(spec: &AperiodicPolingSpec) -> Result<LayerSequence> {
    spec.validate()?;
    let layers = (0..spec.n_layers)
        .map(|j| Layer {
            length: spec.l0 + j as f64 * spec.zeta,
            chi: if j % 2 == 0 { spec.chi0 } else { -spec.chi0 },
            dk_offset: 0.0,
        })
        .collect();
    LayerSequence::new(layers)
}

/// Equal-length alternating-sign stack (the zeta = 0 limit of aperiodic
/// poling).
pub fn build_periodic(n_layers: usize, l0: f64, chi0: f64) -> Result<LayerSequence> {
    build_aperiodic(&AperiodicPolingSpec {
        n_layers,
        l0,
        zeta: 0.0,
        chi0,
    })
}

/// Spatial chirp parameter from refractive-index slopes:
/// alpha = (2*pi/lambda0) * (beta0 - beta_s/2 - beta_i/2), um^-2.
pub fn alpha_from_index_chirp(d: &DispersionParams, idx: &IndexChirpSpec) -> Result<f64> {
    d.validate()?;
    idx.validate()?;
    Ok(d.pump_omega_over_c() * (idx.beta0 - 0.5 * idx.beta_s - 0.5 * idx.beta_i))
}

/// Poling chirp equivalent to a spatial chirp: zeta = alpha * l0^3 / pi.
pub fn zeta_from_alpha(l0: f64, alpha: f64) -> Result<f64> {
    require_finite("l0", l0)?;
    require_finite("alpha", alpha)?;
    if l0 <= 0.0 {
        return Err(Error::invalid("l0", "layer length must be > 0"));
    }
    Ok(alpha * l0.powi(3) / std::f64::consts::PI)
}

/// Inverse of [`zeta_from_alpha`]: alpha = pi * zeta / l0^3.
pub fn alpha_from_zeta(l0: f64, zeta: f64) -> Result<f64> {
    require_finite("l0", l0)?;
    require_finite("zeta", zeta)?;
    if l0 <= 0.0 {
        return Err(Error::invalid("l0", "layer length must be > 0"));
    }
    Ok(std::f64::consts::PI * zeta / l0.powi(3))
}

/// First-layer length that packs N layers of the caption convention
/// (l_n = l0 + n*zeta, n = 1..N) into total length L:
/// l0 = L/N - zeta*(N+1)/2.
pub fn solve_l0(n_layers: usize, zeta: f64, total_len: f64) -> Result<f64> {
    if n_layers == 0 {
        return Err(Error::invalid("n_layers", "need at least one layer"));
    }
    require_finite("zeta", zeta)?;
    require_finite("total_len", total_len)?;
    if total_len <= 0.0 {
        return Err(Error::invalid("total_len", "total length must be > 0"));
    }
    let n = n_layers as f64;
    let l0 = total_len / n - zeta * (n + 1.0) / 2.0;
    // Under this convention the shortest layer is l0 + zeta (zeta >= 0) or
    // l0 + N*zeta (zeta < 0).
    let shortest = if zeta >= 0.0 { l0 + zeta } else { l0 + n * zeta };
    if l0 <= 0.0 || shortest <= 0.0 {
        return Err(Error::invalid(
            "zeta",
            format!("chirp too large for N = {n_layers}, L = {total_len}"),
        ));
    }
    Ok(l0)
}

/// Parametric description of a layered stack, covering every structure kind
/// the engine evaluates.
#[derive(Debug, Clone, PartialEq)]
pub enum StructureSpec {
    Photonic(PhotonicChirpSpec),
    Aperiodic(AperiodicPolingSpec),
    Periodic {
        n_layers: usize,
        l0: f64,
        chi0: f64,
    },
    Explicit(LayerSequence),
}

impl StructureSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            StructureSpec::Photonic(s) => s.validate(),
            StructureSpec::Aperiodic(s) => s.validate(),
            StructureSpec::Periodic { n_layers, l0, chi0 } => {
                AperiodicPolingSpec {
                    n_layers: *n_layers,
                    l0: *l0,
                    zeta: 0.0,
                    chi0: *chi0,
                }
                .validate()
            }
            StructureSpec::Explicit(_) => Ok(()),
        }
    }

    pub fn build(&self) -> Result<LayerSequence> {
        match self {
            StructureSpec::Photonic(s) => build_photonic(s),
            StructureSpec::Aperiodic(s) => build_aperiodic(s),
            StructureSpec::Periodic { n_layers, l0, chi0 } => {
                build_periodic(*n_layers, *l0, *chi0)
            }
            StructureSpec::Explicit(seq) => Ok(seq.clone()),
        }
    }

    pub fn total_length(&self) -> f64 {
        match self {
            StructureSpec::Photonic(s) => s.total_len(),
            StructureSpec::Aperiodic(s) => s.total_len(),
            StructureSpec::Periodic { n_layers, l0, .. } => *n_layers as f64 * l0,
            StructureSpec::Explicit(seq) => seq.total_length(),
        }
    }

    /// One-line description used to tag spectra and output files.
    pub fn descriptor(&self) -> String {
        match self {
            StructureSpec::Photonic(s) => format!(
                "photonic N={} l={} alpha={} chi0={}",
                s.n_layers, s.layer_len, s.alpha, s.chi0
            ),
            StructureSpec::Aperiodic(s) => format!(
                "aperiodic N={} l0={} zeta={} chi0={}",
                s.n_layers, s.l0, s.zeta, s.chi0
            ),
            StructureSpec::Periodic { n_layers, l0, chi0 } => {
                format!("periodic N={n_layers} l0={l0} chi0={chi0}")
            }
            StructureSpec::Explicit(seq) => format!("explicit N={}", seq.len()),
        }
    }
}
