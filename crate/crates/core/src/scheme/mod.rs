//! The scheme family: every routing scheme implements one trait, registers
//! under a stable name, and is selected at runtime by the CLI or config.
//!
//! Preprocessing produces a [`SchemeInstance`]: per-vertex tables, per-vertex
//! labels, and the parameters a hop decision needs. Routing itself is a pure
//! function of (current vertex's table, destination label, header), shared by
//! all schemes in [`crate::sim`]; only header initialization is per-scheme.

pub mod common;

mod gen_ell;
mod local_scheme;
mod scheme21;
mod scheme5;
mod tz;
mod warmup3;

use crate::error::{BuildError, RouteError};
use crate::graph::Graph;
use crate::header::Header;
use crate::label::Label;
use crate::table::VertexTable;
use crate::weight::{format_weight, w_int, w_one, W};

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeParams {
    pub epsilon: Option<W>,
    pub k: Option<u32>,
    pub ell: Option<u32>,
    /// Vicinity sizing constant: vicinities hold ceil(alpha * q * log2 n)
    /// vertices.
    pub alpha: W,
    /// Color classes may hold up to beta * n / q vertices.
    pub beta: W,
    pub seed: u64,
}

impl Default for SchemeParams {
    fn default() -> Self {
        SchemeParams {
            epsilon: None,
            k: None,
            ell: None,
            alpha: w_one(),
            beta: w_int(4),
            seed: 0,
        }
    }
}

impl SchemeParams {
    pub fn epsilon(&self) -> Result<&W, BuildError> {
        use num_traits::Signed;
        match &self.epsilon {
            Some(e) if e.is_positive() => Ok(e),
            Some(_) => Err(BuildError::InvalidParam("epsilon must be positive".into())),
            None => Err(BuildError::InvalidParam("this scheme needs epsilon".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    Local,
    Warmup3,
    Scheme21,
    Scheme5,
    GenMinus,
    GenPlus,
    Tz,
    Tz4k7,
}

impl SchemeKind {
    pub fn id(&self) -> &'static str {
        match self {
            SchemeKind::Local => "local",
            SchemeKind::Warmup3 => "warmup3",
            SchemeKind::Scheme21 => "scheme21",
            SchemeKind::Scheme5 => "scheme5",
            SchemeKind::GenMinus => "genminus",
            SchemeKind::GenPlus => "genplus",
            SchemeKind::Tz => "tz",
            SchemeKind::Tz4k7 => "tz4k7",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "local" => SchemeKind::Local,
            "warmup3" => SchemeKind::Warmup3,
            "scheme21" => SchemeKind::Scheme21,
            "scheme5" => SchemeKind::Scheme5,
            "genminus" => SchemeKind::GenMinus,
            "genplus" => SchemeKind::GenPlus,
            "tz" => SchemeKind::Tz,
            "tz4k7" => SchemeKind::Tz4k7,
            _ => return None,
        })
    }

    pub(crate) fn tag(&self) -> u8 {
        match self {
            SchemeKind::Local => 0,
            SchemeKind::Warmup3 => 1,
            SchemeKind::Scheme21 => 2,
            SchemeKind::Scheme5 => 3,
            SchemeKind::GenMinus => 4,
            SchemeKind::GenPlus => 5,
            SchemeKind::Tz => 6,
            SchemeKind::Tz4k7 => 7,
        }
    }

    pub(crate) fn from_tag(tag: u8) -> Option<Self> {
        Some(match tag {
            0 => SchemeKind::Local,
            1 => SchemeKind::Warmup3,
            2 => SchemeKind::Scheme21,
            3 => SchemeKind::Scheme5,
            4 => SchemeKind::GenMinus,
            5 => SchemeKind::GenPlus,
            6 => SchemeKind::Tz,
            7 => SchemeKind::Tz4k7,
            _ => return None,
        })
    }
}

/// Key numbers realized during a build, for reports.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BuildStats {
    pub q: usize,
    pub vicinity_sizes: Vec<usize>,
    pub center_sizes: Vec<usize>,
    pub coloring_attempts: Vec<usize>,
    pub hitting_size: usize,
    pub sample_attempts: usize,
}

pub struct SchemeInstance {
    pub kind: SchemeKind,
    pub params: SchemeParams,
    pub graph_digest: u64,
    pub n: usize,
    pub max_degree: usize,
    /// Color count, for label bit accounting.
    pub q: usize,
    pub tables: Vec<VertexTable>,
    pub labels: Vec<Label>,
    /// Structural upper bound on header bits, from the parameters.
    pub header_bound_bits: u64,
    pub stats: BuildStats,
}

impl SchemeInstance {
    /// Header written at the source. Reads only the source's own table and
    /// the destination label.
    pub fn init_header(&self, source: &VertexTable, label: &Label) -> Result<Header, RouteError> {
        match self.kind {
            SchemeKind::Local => local_scheme::init(source, label),
            SchemeKind::Warmup3 => warmup3::init(source, label),
            SchemeKind::Scheme21 => scheme21::init(source, label),
            SchemeKind::Scheme5 => scheme5::init(source, label),
            SchemeKind::GenMinus => gen_ell::init(self, source, label, gen_ell::Sign::Minus),
            SchemeKind::GenPlus => gen_ell::init(self, source, label, gen_ell::Sign::Plus),
            SchemeKind::Tz => tz::init_tz(self, source, label),
            SchemeKind::Tz4k7 => tz::init_4k7(self, source, label),
        }
    }

    /// Exact per-pair length bound this scheme promises, as a function of
    /// the distance.
    pub fn bound(&self, d: &W) -> W {
        let eps = self.params.epsilon.clone().unwrap_or_else(w_one);
        match self.kind {
            SchemeKind::Local => d.clone(),
            SchemeKind::Warmup3 => (w_int(3) + w_int(2) * eps) * d.clone(),
            SchemeKind::Scheme21 => (w_int(2) + w_int(2) * eps) * d.clone() + w_one(),
            SchemeKind::Scheme5 => (w_int(5) + w_int(3) * eps) * d.clone(),
            SchemeKind::GenMinus => {
                let ell = w_int(self.params.ell.unwrap_or(2) as i64);
                if *d == w_one() {
                    w_int(3) + eps
                } else {
                    (w_int(3) + w_int(3) * eps.clone() - (w_int(2) + eps) / ell) * d.clone()
                        + w_int(2)
                }
            }
            SchemeKind::GenPlus => {
                let ell = w_int(self.params.ell.unwrap_or(2) as i64);
                if *d == w_one() {
                    w_int(5) + eps
                } else {
                    (w_int(3) + w_int(2) / ell + w_int(4) * eps) * d.clone() + w_int(2)
                }
            }
            SchemeKind::Tz => {
                let k = w_int(self.params.k.unwrap_or(2) as i64);
                (w_int(4) * k - w_int(5)) * d.clone()
            }
            SchemeKind::Tz4k7 => {
                let k = w_int(self.params.k.unwrap_or(3) as i64);
                (w_int(4) * k.clone() - w_int(7) + eps * (w_int(2) * k - w_int(3))) * d.clone()
            }
        }
    }

    /// Human-readable form of the bound, echoed into reports.
    pub fn bound_formula(&self) -> String {
        let eps = self
            .params
            .epsilon
            .as_ref()
            .map(format_weight)
            .unwrap_or_else(|| "-".into());
        match self.kind {
            SchemeKind::Local => "routed = d".into(),
            SchemeKind::Warmup3 => format!("routed <= (3+2e)*d, e={eps}"),
            SchemeKind::Scheme21 => format!("routed <= (2+2e)*d+1, e={eps}"),
            SchemeKind::Scheme5 => format!("routed <= (5+3e)*d, e={eps}"),
            SchemeKind::GenMinus => format!(
                "routed <= (3+3e-(2+e)/l)*d+2 (<=3+e when d=1), e={eps}, l={}",
                self.params.ell.unwrap_or(2)
            ),
            SchemeKind::GenPlus => format!(
                "routed <= (3+2/l+4e)*d+2 (<=5+e when d=1), e={eps}, l={}",
                self.params.ell.unwrap_or(2)
            ),
            SchemeKind::Tz => format!("routed <= (4k-5)*d, k={}", self.params.k.unwrap_or(2)),
            SchemeKind::Tz4k7 => format!(
                "routed <= (4k-7+e(2k-3))*d, k={}, e={eps}",
                self.params.k.unwrap_or(3)
            ),
        }
    }
}

/// A buildable routing scheme, as registered in [`registry`].
pub trait Scheme: Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    fn preprocess(&self, g: &Graph, params: &SchemeParams) -> Result<SchemeInstance, BuildError>;
}

macro_rules! scheme_entry {
    ($ty:ident, $kind:expr, $summary:expr, $pre:path) => {
        pub struct $ty;
        impl Scheme for $ty {
            fn name(&self) -> &'static str {
                $kind.id()
            }
            fn summary(&self) -> &'static str {
                $summary
            }
            fn preprocess(
                &self,
                g: &Graph,
                params: &SchemeParams,
            ) -> Result<SchemeInstance, BuildError> {
                $pre(g, params)
            }
        }
    };
}

scheme_entry!(
    LocalEntry,
    SchemeKind::Local,
    "exact vicinity routing; destination must be among the ell closest vertices (param: ell)",
    local_scheme::preprocess
);
scheme_entry!(
    Warmup3Entry,
    SchemeKind::Warmup3,
    "(3+2e)-stretch on weighted graphs (params: epsilon, seed)",
    warmup3::preprocess
);
scheme_entry!(
    Scheme21Entry,
    SchemeKind::Scheme21,
    "(2+2e, +1)-stretch on unweighted graphs (params: epsilon, seed)",
    scheme21::preprocess
);
scheme_entry!(
    Scheme5Entry,
    SchemeKind::Scheme5,
    "(5+3e)-stretch on weighted graphs (params: epsilon, seed)",
    scheme5::preprocess
);
scheme_entry!(
    GenMinusEntry,
    SchemeKind::GenMinus,
    "(3+3e-(2+e)/l, +2)-stretch on unweighted graphs (params: ell>=2, epsilon, seed)",
    gen_ell::preprocess_minus
);
scheme_entry!(
    GenPlusEntry,
    SchemeKind::GenPlus,
    "(3+2/l+4e, +2)-stretch on unweighted graphs (params: ell>=2, epsilon, seed)",
    gen_ell::preprocess_plus
);
scheme_entry!(
    TzEntry,
    SchemeKind::Tz,
    "(4k-5)-stretch baseline on weighted graphs (params: k>=2, seed)",
    tz::preprocess_tz45
);
scheme_entry!(
    Tz4k7Entry,
    SchemeKind::Tz4k7,
    "(4k-7+e(2k-3))-stretch on weighted graphs (params: k>=3, epsilon, seed)",
    tz::preprocess_4k7
);

static REGISTRY: &[&dyn Scheme] = &[
    &LocalEntry,
    &Warmup3Entry,
    &Scheme21Entry,
    &Scheme5Entry,
    &GenMinusEntry,
    &GenPlusEntry,
    &TzEntry,
    &Tz4k7Entry,
];

pub fn registry() -> &'static [&'static dyn Scheme] {
    REGISTRY
}

pub fn by_name(name: &str) -> Result<&'static dyn Scheme, BuildError> {
    registry()
        .iter()
        .find(|s| s.name() == name)
        .copied()
        .ok_or_else(|| BuildError::UnknownScheme(name.to_string()))
}
