//! Experiment registry.

use std::path::PathBuf;

use crate::config::ExperimentConfig;
use crate::experiments;
use crate::CliError;

pub const KINDS: [&str; 8] = ["verify-cocycle", "classical", "hpf", "quantum", "boost", "dress", "frame", "pathint"];

pub struct CheckSpec {
    pub name: &'static str,
    pub tolerance: f64,
    pub tags: &'static [&'static str],
}

const fn check(name: &'static str, tolerance: f64, tags: &'static [&'static str]) -> CheckSpec {
    CheckSpec { name, tolerance, tags }
}

/// Shared state of one experiment run.
pub struct Ctx<'a> {
    pub config: &'a ExperimentConfig,
    pub seed: u64,
    pub dir: PathBuf,
    pub artifacts: Vec<String>,
}

impl Ctx<'_> {
    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        std::fs::create_dir_all(&self.dir)?;
        std::fs::write(self.dir.join(name), bytes)?;
        self.artifacts.push(name.to_string());
        Ok(())
    }
}

pub type Measurements = Vec<(&'static str, f64)>;

pub struct Entry {
    pub name: &'static str,
    pub kind: &'static str,
    pub stream: u64,
    pub checks: &'static [CheckSpec],
    pub run: fn(&mut Ctx) -> Result<Measurements, CliError>,
}

impl Entry {
    pub fn tags(&self) -> Vec<&'static str> {
        let mut t: Vec<&'static str> = self.checks.iter().flat_map(|c| c.tags.iter().copied()).collect();
        t.sort_unstable();
        t.dedup();
        t
    }
}

pub static REGISTRY: &[Entry] = &[
    Entry {
        name: "cocycle-identity",
        kind: "verify-cocycle",
        stream: 1,
        checks: &[
            check("cocycle-identity", 1e-10, &["lagrangian-cocycle", "cocycle-property"]),
            check("cocycle-inverse", 1e-10, &["cocycle-property", "structure-group"]),
            check("cocycle-phase-homomorphism", 1e-12, &["u1-cocycle"]),
            check("external-invariance", 1e-12, &["external-shift", "translation-invariance"]),
        ],
        run: experiments::cocycle::run,
    },
    Entry {
        name: "gauge-split",
        kind: "classical",
        stream: 2,
        checks: &[
            check("gauge-split", 1e-10, &["gauge-transformed-action", "path-cocycle"]),
            check("gauge-split-config", 1e-10, &["gauge-transformed-action", "gauge-field"]),
        ],
        run: experiments::classical::gauge_split,
    },
    Entry {
        name: "variational",
        kind: "classical",
        stream: 3,
        checks: &[
            check("free-critical-path", 1e-6, &["variational-principle", "critical-path"]),
            check("harmonic-critical-path", 1e-6, &["variational-principle", "critical-path"]),
            check("free-el-residual", 1e-10, &["euler-lagrange"]),
            check("harmonic-el-residual", 1e-8, &["euler-lagrange"]),
            check("stationarity", 1e-6, &["lie-algebra-variation", "first-variation"]),
            check("linear-cocycle-stationarity", 1e-9, &["linear-cocycle", "first-variation"]),
            check("noether-charge", 1e-10, &["noether-charge"]),
        ],
        run: experiments::classical::variational,
    },
    Entry {
        name: "hpf-hamilton-jacobi",
        kind: "hpf",
        stream: 4,
        checks: &[
            check("hpf-closed-form", 1e-8, &["hamilton-principal-function"]),
            check("hamilton-jacobi", 1e-6, &["hamilton-jacobi", "momentum-prescription"]),
            check("flat-connection-curl", 1e-6, &["flat-cocyclic-connection"]),
        ],
        run: experiments::classical::hpf,
    },
    Entry {
        name: "quantum-invariants",
        kind: "quantum",
        stream: 5,
        checks: &[
            check("norm-drift", 1e-12, &["unitarity", "schrodinger-evolution"]),
            check("packet-spreading", 1e-4, &["schrodinger-evolution"]),
            check("commutator", 1e-8, &["canonical-commutator", "momentum-operator"]),
        ],
        run: experiments::quantum::invariants,
    },
    Entry {
        name: "covariant-derivative",
        kind: "quantum",
        stream: 6,
        checks: &[
            check("covariant-derivative-space", 1e-6, &["cocyclic-covariant-derivative", "momentum-prescription"]),
            check("covariant-derivative-time", 1e-6, &["cocyclic-covariant-derivative", "schrodinger-equation"]),
            check("meta-action", 1e-5, &["meta-action"]),
        ],
        run: experiments::quantum::covariant,
    },
    Entry {
        name: "boost-covariance",
        kind: "boost",
        stream: 7,
        checks: &[
            check("boost-covariance", 1e-4, &["galilean-boost", "u1-cocycle"]),
            check("boost-refinement", 1.0, &["galilean-boost", "convergence"]),
        ],
        run: experiments::quantum::boost,
    },
    Entry {
        name: "dressing-identities",
        kind: "dress",
        stream: 8,
        checks: &[
            check("dressing-external-shift", 1e-9, &["dressing-field", "external-shift"]),
            check("dressing-internal-shift", 1e-9, &["dressing-field", "internal-shift"]),
            check("dressing-internal-shift-expanded", 1e-9, &["dressing-field", "internal-shift"]),
            check("dressing-frame-shift", 1e-9, &["dressing-field", "frame-group"]),
            check("frame-shift-transform", 1e-9, &["frame-group"]),
            check("frame-shift-composite", 1e-9, &["frame-group"]),
            check("dressed-lagrangian-frame-change", 1e-9, &["frame-group", "relational-lagrangian"]),
            check("frame-correction-antisymmetry", 1e-9, &["frame-group"]),
            check("relational-lagrangian-telescoping", 1e-9, &["relational-lagrangian"]),
            check("rule-of-thumb-phase", 1e-9, &["u1-cocycle", "dressing-field"]),
            check("dressed-lagrangian-pointwise", 1e-12, &["relational-lagrangian"]),
            check("dressed-action-split", 1e-9, &["dressing-field", "path-cocycle"]),
        ],
        run: experiments::dressing::identities,
    },
    Entry {
        name: "relational-consistency",
        kind: "dress",
        stream: 9,
        checks: &[check("relational-critical-path", 1e-8, &["relational-variational", "dressing-field"])],
        run: experiments::dressing::consistency,
    },
    Entry {
        name: "dress-evolve-commutation",
        kind: "dress",
        stream: 10,
        checks: &[check("dress-evolve-commutation", 1e-3, &["relational-wave-function", "schrodinger-evolution"])],
        run: experiments::dressing::commutation,
    },
    Entry {
        name: "frame-change",
        kind: "frame",
        stream: 11,
        checks: &[
            check("frame-change-modulus", 1e-12, &["frame-change", "unitarity"]),
            check("frame-change-norm", 1e-12, &["frame-change", "unitarity"]),
            check("frame-change-round-trip", 1e-8, &["frame-change", "frame-group"]),
        ],
        run: experiments::dressing::frame,
    },
    Entry {
        name: "path-integral",
        kind: "pathint",
        stream: 12,
        checks: &[
            check("kernel-error", 1e-2, &["path-integral", "free-propagator"]),
            check("kernel-uniformity", 1e-3, &["path-integral", "free-propagator"]),
            check("kernel-refinement", 1.0, &["path-integral", "convergence"]),
            check("split-normalization", 1e-3, &["classical-split", "normalization"]),
            check("split-hpf-agreement", 1e-8, &["classical-split", "hamilton-principal-function"]),
            check("semigroup", 1e-3, &["path-integral", "composition"]),
            check("propagate-vs-evolve", 1e-2, &["fiber-integration", "schrodinger-evolution"]),
            check("relational-kernel", 1e-2, &["relational-path-integral", "relational-lagrangian"]),
            check("split-frame-agreement", 1e-9, &["relational-path-integral", "normalization"]),
            check("anchor-swap", 1e-3, &["relational-path-integral", "frame-change"]),
            check("dressed-bare-consistency", 1e-3, &["relational-path-integral", "relational-wave-function"]),
        ],
        run: experiments::pathint::run,
    },
];

/// Entries selected by `kind`; `all` expands to the full registry.
pub fn select(kind: &str) -> Result<Vec<&'static Entry>, CliError> {
    if kind == "all" {
        return Ok(REGISTRY.iter().collect());
    }
    if !KINDS.contains(&kind) {
        return Err(CliError::Config(format!("schema error: unknown experiment kind {kind:?}")));
    }
    Ok(REGISTRY.iter().filter(|e| e.kind == kind).collect())
}

pub fn check_spec(name: &str) -> Option<&'static CheckSpec> {
    REGISTRY.iter().flat_map(|e| e.checks).find(|c| c.name == name)
}

/// Registry listing, one experiment per line with its kind and tags.
pub fn list_experiments() -> String {
    let mut s = String::new();
    for e in REGISTRY {
        s.push_str(&format!("{:<26} {:<15} {}\n", e.name, e.kind, e.tags().join(", ")));
    }
    s
}
