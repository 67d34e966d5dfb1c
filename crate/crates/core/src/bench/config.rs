use std::collections::HashSet;
use std::path::Path;

use serde::Deserialize;

use super::BenchError;
use crate::model::{
    build_latent_layout, build_partition, AdmmConfig, GroupPartition, LatentGroupLayout,
    PenaltyConfig, UpdateOrder,
};
use crate::sensing::{AmplitudeJitter, BlockSpec, SensingConfig, Segment};
use crate::solvers::{variant_config, VariantKind};

pub const DEFAULT_MU_GRID: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

const DEFAULT_N: usize = 140;
const DEFAULT_MU: f64 = 0.5;
const DEFAULT_SIGMA2: f64 = 0.25;
const DEFAULT_SEED: u64 = 2024;
const DEFAULT_TRIALS: usize = 20;
const DEFAULT_GROUP_SIZE: usize = 10;
const DEFAULT_OVERLAP: usize = 5;
const G_LASSO_LAMBDA_G: f64 = 12.5;

#[derive(Debug, Clone, PartialEq)]
pub enum Grouping {
    Disjoint(GroupPartition),
    Latent(LatentGroupLayout),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariantEntry {
    pub name: String,
    pub kind: VariantKind,
    pub penalties: PenaltyConfig,
    pub grouping: Grouping,
}

/// A validated experiment. `sensing.mu` is used by the reconstruction run,
/// `mu_grid` by the sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub sensing: SensingConfig,
    pub signal: BlockSpec,
    pub variants: Vec<VariantEntry>,
    pub admm: AdmmConfig,
    pub trials: usize,
    pub mu_grid: Vec<f64>,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        parse_config("").expect("default configuration is valid")
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    /// Variant names or kinds to keep; kinds not in the file are added with
    /// default settings.
    pub variants: Option<Vec<String>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    trials: Option<usize>,
    mu_grid: Option<Vec<f64>>,
    #[serde(default)]
    sensing: RawSensing,
    #[serde(default)]
    admm: RawAdmm,
    signal: Option<RawSignal>,
    variants: Option<Vec<RawVariant>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSensing {
    n: Option<usize>,
    mu: Option<f64>,
    sigma2: Option<f64>,
    seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAdmm {
    c_u: Option<f64>,
    c_z: Option<f64>,
    max_iter: Option<usize>,
    tol: Option<f64>,
    order: Option<UpdateOrder>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSignal {
    segments: Vec<Segment>,
    jitter: Option<AmplitudeJitter>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVariant {
    kind: VariantKind,
    name: Option<String>,
    lambda_e: Option<f64>,
    lambda_g: Option<f64>,
    lambda_f: Option<f64>,
    group_size: Option<usize>,
    groups: Option<usize>,
    overlap: Option<usize>,
}

impl RawVariant {
    fn of_kind(kind: VariantKind) -> Self {
        RawVariant {
            kind,
            name: None,
            lambda_e: None,
            lambda_g: None,
            lambda_f: None,
            group_size: None,
            groups: None,
            overlap: None,
        }
    }
}

fn default_variants() -> Vec<RawVariant> {
    [VariantKind::Sgf, VariantKind::Lgf, VariantKind::GLasso]
        .into_iter()
        .map(RawVariant::of_kind)
        .collect()
}

pub fn load_config(path: &Path) -> Result<ExperimentSpec, BenchError> {
    load_config_with(path, &Overrides::default())
}

pub fn load_config_with(path: &Path, overrides: &Overrides) -> Result<ExperimentSpec, BenchError> {
    let text = std::fs::read_to_string(path).map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_named(&text, &path.display().to_string(), overrides)
}

/// Parses configuration text; an empty string yields the all-defaults spec.
pub fn parse_config(text: &str) -> Result<ExperimentSpec, BenchError> {
    parse_named(text, "<config>", &Overrides::default())
}

impl ExperimentSpec {
    pub fn from_text(text: &str, overrides: &Overrides) -> Result<Self, BenchError> {
        parse_named(text, "<config>", overrides)
    }

    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<Self, BenchError> {
        match path {
            Some(p) => load_config_with(p, overrides),
            None => Self::from_text("", overrides),
        }
    }

    /// Position of a variant in the configured order.
    pub fn variant_index(&self, name: &str) -> Option<usize> {
        self.variants.iter().position(|v| v.name == name)
    }
}

fn parse_named(text: &str, origin: &str, overrides: &Overrides) -> Result<ExperimentSpec, BenchError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| BenchError::Parse {
        path: origin.to_string(),
        message: e.to_string(),
    })?;
    build_spec(raw, overrides)
}

fn field_err(field: &str) -> impl Fn(crate::Error) -> BenchError + '_ {
    move |e| BenchError::validation(field, e)
}

fn build_spec(raw: RawConfig, overrides: &Overrides) -> Result<ExperimentSpec, BenchError> {
    let n = raw.sensing.n.unwrap_or(DEFAULT_N);
    let mu = raw.sensing.mu.unwrap_or(DEFAULT_MU);
    let sigma2 = raw.sensing.sigma2.unwrap_or(DEFAULT_SIGMA2);
    let seed = overrides.seed.or(raw.sensing.seed).unwrap_or(DEFAULT_SEED);
    let sensing = SensingConfig::new(n, mu, sigma2, seed).map_err(|e| match e {
        crate::Error::InvalidParameter { name, reason } => {
            BenchError::validation(format!("sensing.{name}"), reason)
        }
        other => BenchError::validation("sensing", other),
    })?;

    let defaults = AdmmConfig::default();
    let admm = AdmmConfig::new(
        raw.admm.c_u.unwrap_or(defaults.c_u),
        raw.admm.c_z.unwrap_or(defaults.c_z),
        raw.admm.max_iter.unwrap_or(defaults.max_iter),
        raw.admm.tol.unwrap_or(defaults.tol),
    )
    .map_err(|e| match e {
        crate::Error::InvalidParameter { name, reason } => {
            BenchError::validation(format!("admm.{name}"), reason)
        }
        other => BenchError::validation("admm", other),
    })?
    .with_order(raw.admm.order.unwrap_or_default());

    let trials = overrides.trials.or(raw.trials).unwrap_or(DEFAULT_TRIALS);
    if trials == 0 {
        return Err(BenchError::validation("trials", "must be at least 1"));
    }

    let mu_grid = raw.mu_grid.unwrap_or_else(|| DEFAULT_MU_GRID.to_vec());
    if mu_grid.is_empty() {
        return Err(BenchError::validation("mu_grid", "must not be empty"));
    }
    for (i, &m) in mu_grid.iter().enumerate() {
        if !(m > 0.0 && m <= 1.0) {
            return Err(BenchError::validation("mu_grid", format!("value {m} is outside (0, 1]")));
        }
        if i > 0 && m <= mu_grid[i - 1] {
            return Err(BenchError::validation("mu_grid", "values must be strictly increasing"));
        }
        SensingConfig::new(n, m, sigma2, seed).map_err(|e| BenchError::validation("mu_grid", e))?;
    }

    let signal = match raw.signal {
        Some(s) => {
            let spec = BlockSpec::new(n, s.segments).map_err(field_err("signal.segments"))?;
            match s.jitter {
                Some(j) => spec.with_jitter(j).map_err(field_err("signal.jitter"))?,
                None => spec,
            }
        }
        None if n == DEFAULT_N => BlockSpec::reference(),
        None => {
            return Err(BenchError::validation(
                "signal.segments",
                format!("required when sensing.n differs from {DEFAULT_N}"),
            ))
        }
    };

    let mut raw_variants = raw.variants.unwrap_or_else(default_variants);
    if let Some(wanted) = &overrides.variants {
        raw_variants = select_variants(raw_variants, wanted)?;
    }
    if raw_variants.is_empty() {
        return Err(BenchError::validation("variants", "at least one variant is required"));
    }
    let mut seen = HashSet::new();
    let variants = raw_variants
        .into_iter()
        .enumerate()
        .map(|(i, rv)| build_variant(i, rv, n, &mut seen))
        .collect::<Result<Vec<_>, _>>()?;

    Ok(ExperimentSpec {
        sensing,
        signal,
        variants,
        admm,
        trials,
        mu_grid,
    })
}

fn select_variants(all: Vec<RawVariant>, wanted: &[String]) -> Result<Vec<RawVariant>, BenchError> {
    let mut out = Vec::new();
    for w in wanted.iter().map(|w| w.trim()).filter(|w| !w.is_empty()) {
        let by_name: Vec<RawVariant> = all
            .iter()
            .filter(|v| v.name.as_deref() == Some(w))
            .cloned()
            .collect();
        if !by_name.is_empty() {
            out.extend(by_name);
            continue;
        }
        let kind: VariantKind = w
            .parse()
            .map_err(|_| BenchError::validation("variants", format!("unknown variant `{w}`")))?;
        let by_kind: Vec<RawVariant> = all.iter().filter(|v| v.kind == kind).cloned().collect();
        if by_kind.is_empty() {
            out.push(RawVariant::of_kind(kind));
        } else {
            out.extend(by_kind);
        }
    }
    Ok(out)
}

fn build_variant(
    index: usize,
    rv: RawVariant,
    n: usize,
    seen: &mut HashSet<String>,
) -> Result<VariantEntry, BenchError> {
    let field = |f: &str| format!("variants[{index}].{f}");
    let base = PenaltyConfig::default();
    let default_g = if rv.kind == VariantKind::GLasso { G_LASSO_LAMBDA_G } else { base.lambda_g };
    let penalties = PenaltyConfig::new(
        rv.lambda_e.unwrap_or(base.lambda_e),
        rv.lambda_g.unwrap_or(default_g),
        rv.lambda_f.unwrap_or(base.lambda_f),
    )
    .map_err(|e| match e {
        crate::Error::InvalidParameter { name, reason } => BenchError::validation(field(name), reason),
        other => BenchError::validation(field("lambda"), other),
    })?;
    let penalties = variant_config(rv.kind, penalties);

    let grouping = if rv.kind.is_latent() {
        if rv.groups.is_some() {
            return Err(BenchError::validation(field("groups"), "latent groups are set by group_size and overlap"));
        }
        let size = rv.group_size.unwrap_or(DEFAULT_GROUP_SIZE);
        let k = rv.overlap.unwrap_or(DEFAULT_OVERLAP);
        Grouping::Latent(build_latent_layout(n, size, k).map_err(|e| BenchError::validation(field("overlap"), e))?)
    } else {
        if rv.overlap.is_some() {
            return Err(BenchError::validation(field("overlap"), "only valid for kind = \"lgf\""));
        }
        let (g, f) = match (rv.groups, rv.group_size) {
            (Some(_), Some(_)) => {
                return Err(BenchError::validation(field("groups"), "give either groups or group_size"))
            }
            (Some(g), None) => (g, "groups"),
            (None, Some(s)) if s > 0 && n.is_multiple_of(s) => (n / s, "group_size"),
            (None, Some(s)) => {
                return Err(BenchError::validation(field("group_size"), format!("{s} does not divide n = {n}")))
            }
            (None, None) if n.is_multiple_of(DEFAULT_GROUP_SIZE) => (n / DEFAULT_GROUP_SIZE, "group_size"),
            (None, None) => {
                return Err(BenchError::validation(
                    field("group_size"),
                    format!("default size {DEFAULT_GROUP_SIZE} does not divide n = {n}"),
                ))
            }
        };
        Grouping::Disjoint(build_partition(n, g).map_err(|e| BenchError::validation(field(f), e))?)
    };

    let base_name = rv.name.unwrap_or_else(|| rv.kind.display_name().to_string());
    let mut name = base_name.clone();
    let mut k = 2;
    while !seen.insert(name.clone()) {
        name = format!("{base_name}-{k}");
        k += 1;
    }
    Ok(VariantEntry {
        name,
        kind: rv.kind,
        penalties,
        grouping,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_reference_protocol() {
        let spec = parse_config("").unwrap();
        assert_eq!(spec.sensing.n, 140);
        assert_eq!(spec.sensing.mu, 0.5);
        assert_eq!(spec.sensing.sigma2, 0.25);
        assert_eq!(spec.admm, AdmmConfig::default());
        assert_eq!((spec.admm.c_u, spec.admm.c_z, spec.admm.max_iter, spec.admm.tol), (2.0, 2.0, 150, 1e-3));
        assert_eq!(spec.trials, 20);
        assert_eq!(spec.mu_grid, DEFAULT_MU_GRID.to_vec());
        assert_eq!(spec.signal, BlockSpec::reference());

        let names: Vec<&str> = spec.variants.iter().map(|v| v.name.as_str()).collect();
        assert_eq!(names, ["SGF-LASSO", "LGF-LASSO", "G-LASSO"]);
        let sgf = &spec.variants[0];
        assert_eq!(sgf.penalties, PenaltyConfig::new(0.5, 5.0, 3.0).unwrap());
        assert!(matches!(&sgf.grouping, Grouping::Disjoint(p) if p.num_groups() == 14 && p.group_size() == 10));
        let lgf = &spec.variants[1];
        assert_eq!(lgf.penalties, PenaltyConfig::new(0.0, 5.0, 3.0).unwrap());
        assert!(matches!(&lgf.grouping, Grouping::Latent(l) if l.num_groups() == 27 && l.overlap() == 5));
        let gl = &spec.variants[2];
        assert_eq!(gl.penalties, PenaltyConfig::new(0.0, 12.5, 0.0).unwrap());
    }

    #[test]
    fn validation_errors_name_the_field() {
        let e = parse_config("[sensing]\nmu = 1.5\n").unwrap_err();
        assert!(matches!(&e, BenchError::Validation { field, .. } if field == "sensing.mu"), "{e}");
        assert_eq!(e.exit_code(), 1);

        let e = parse_config("[[variants]]\nkind = \"sgf\"\ngroups = 13\n").unwrap_err();
        assert!(matches!(&e, BenchError::Validation { field, .. } if field == "variants[0].groups"), "{e}");

        let e = parse_config("[[variants]]\nkind = \"lgf\"\noverlap = 7\n").unwrap_err();
        assert!(matches!(&e, BenchError::Validation { field, .. } if field == "variants[0].overlap"));

        let e = parse_config("mu_grid = [0.5, 0.3]").unwrap_err();
        assert!(matches!(&e, BenchError::Validation { field, .. } if field == "mu_grid"));

        let e = parse_config("trials = 0").unwrap_err();
        assert!(matches!(&e, BenchError::Validation { field, .. } if field == "trials"));

        let e = parse_config("[admm]\nc_u = -1.0").unwrap_err();
        assert!(matches!(&e, BenchError::Validation { field, .. } if field == "admm.c_u"));

        let e = parse_config("[sensing]\nn = 50\n").unwrap_err();
        assert!(matches!(&e, BenchError::Validation { field, .. } if field == "signal.segments"));
    }

    #[test]
    fn parse_errors_carry_line_context() {
        let e = parse_config("trials = 3\n[sensing\nn = 4\n").unwrap_err();
        match e {
            BenchError::Parse { message, .. } => assert!(message.contains("line 2"), "{message}"),
            other => panic!("unexpected {other:?}"),
        }
        let e = parse_config("bogus = 1").unwrap_err();
        assert!(matches!(e, BenchError::Parse { .. }));
    }

    #[test]
    fn custom_signal_and_variants() {
        let text = r#"
            trials = 3
            mu_grid = [0.25, 0.5]
            [sensing]
            n = 12
            mu = 0.5
            sigma2 = 0.0
            seed = 9
            [admm]
            order = "jacobi"
            [signal]
            segments = [
              { kind = "zero", length = 4 },
              { kind = "step", length = 4, amplitude = 2.0 },
              { kind = "zero", length = 4 },
            ]
            [[variants]]
            kind = "lasso"
            lambda_e = 0.1
            group_size = 4
            [[variants]]
            kind = "lgf"
            group_size = 4
            overlap = 2
        "#;
        let spec = parse_config(text).unwrap();
        assert_eq!(spec.sensing.seed, 9);
        assert_eq!(spec.admm.order, UpdateOrder::Jacobi);
        assert_eq!(spec.signal.n(), 12);
        assert_eq!(spec.variants[0].penalties, PenaltyConfig::new(0.1, 0.0, 0.0).unwrap());
        assert!(matches!(&spec.variants[1].grouping, Grouping::Latent(l) if l.num_groups() == 5));
    }

    #[test]
    fn overrides_apply() {
        let o = Overrides {
            seed: Some(5),
            trials: Some(2),
            variants: Some(vec!["g_lasso".into(), "f_lasso".into()]),
        };
        let spec = ExperimentSpec::from_text("trials = 7\n[sensing]\nseed = 1\n", &o).unwrap();
        assert_eq!(spec.sensing.seed, 5);
        assert_eq!(spec.trials, 2);
        let kinds: Vec<VariantKind> = spec.variants.iter().map(|v| v.kind).collect();
        assert_eq!(kinds, [VariantKind::GLasso, VariantKind::FLasso]);
        let bad = Overrides { variants: Some(vec!["ridge".into()]), ..Default::default() };
        assert!(ExperimentSpec::from_text("", &bad).is_err());
    }

    #[test]
    fn duplicate_names_are_disambiguated() {
        let spec = parse_config("[[variants]]\nkind = \"sgf\"\n[[variants]]\nkind = \"sgf\"\n").unwrap();
        assert_eq!(spec.variants[0].name, "SGF-LASSO");
        assert_eq!(spec.variants[1].name, "SGF-LASSO-2");
    }
}
