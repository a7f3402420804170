//! Bundled example groups, each with the checks it is expected to pass.
//!
//! The presentations live as JSON under `gallery/` at the workspace root and
//! are compiled in, so `almell gallery` works from any directory.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::decision::{DecisionOptions, GroupPresentation, Verdict};
use crate::ellipticity::{self, SemidirectElement, SemidirectGroup};
use crate::error::{Error, Result};
use crate::linalg::C64;

/// Entry names accepted by [`run`], in run order.
pub const ENTRIES: [&str; 9] = [
    "rot2", "triv_line", "mixed3", "z2inv", "heis_rot", "e2_cover", "un_gl", "su2", "sl2r",
];

const SOURCES: [(&str, &str); 12] = [
    ("rot2", include_str!("../../../gallery/rot2.json")),
    ("triv_line", include_str!("../../../gallery/triv_line.json")),
    ("mixed3", include_str!("../../../gallery/mixed3.json")),
    ("z2inv", include_str!("../../../gallery/z2inv.json")),
    ("heis_rot", include_str!("../../../gallery/heis_rot.json")),
    ("heis_rot_complex", include_str!("../../../gallery/heis_rot_complex.json")),
    ("e2_cover", include_str!("../../../gallery/e2_cover.json")),
    ("e2_euclid", include_str!("../../../gallery/e2_euclid.json")),
    ("un_gl", include_str!("../../../gallery/un_gl.json")),
    ("su2", include_str!("../../../gallery/su2.json")),
    ("su2_r4", include_str!("../../../gallery/su2_r4.json")),
    ("sl2r", include_str!("../../../gallery/sl2r.json")),
];

/// Power bound used when a tilt family does not name one.
pub const DEFAULT_KMAX: usize = 10_000;

/// Radius of the window used for local density probes.
pub const LOCAL_RADIUS: f64 = 0.01;

/// Raw JSON of a bundled file (entries plus the auxiliary presentations they use).
pub fn source(name: &str) -> Result<&'static str> {
    SOURCES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| *s)
        .ok_or_else(|| Error::UnknownGalleryEntry(name.to_string()))
}

pub fn presentation(name: &str) -> Result<GroupPresentation> {
    serde_json::from_str(source(name)?).map_err(|e| Error::Schema {
        path: name.to_string(),
        message: e.to_string(),
    })
}

/// Family of unitary elements acting by `λ = exp(2πiθ)` on a line tilting
/// toward a hyperplane of `C^n`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TiltFamily {
    pub n: usize,
    pub thetas: Vec<f64>,
    /// Tilt parameters in the order they are visited (decreasing toward the hyperplane).
    pub tilts: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kmax: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TiltRow {
    pub theta: f64,
    pub sup_norms: Vec<f64>,
    pub min_sup: f64,
    pub increasing: bool,
}

impl TiltFamily {
    pub fn evaluate(&self, k_max: usize) -> Result<Vec<TiltRow>> {
        self.thetas
            .iter()
            .map(|&theta| {
                let lambda = C64::from_polar(1.0, 2.0 * PI * theta);
                let family = self
                    .tilts
                    .iter()
                    .map(|&e| ellipticity::tilted_line_element(self.n, lambda, e))
                    .collect::<Result<Vec<_>>>()?;
                let sup_norms = ellipticity::power_norm_divergence(&family, k_max)?;
                Ok(TiltRow {
                    theta,
                    min_sup: sup_norms.iter().cloned().fold(f64::INFINITY, f64::min),
                    increasing: sup_norms.windows(2).all(|w| w[1] > w[0]),
                    sup_norms,
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: serde_json::Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct EntryReport {
    pub name: &'static str,
    pub summary: &'static str,
    pub checks: Vec<Check>,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GalleryReport {
    pub entries: Vec<EntryReport>,
    pub passed: bool,
}

fn check(name: &'static str, passed: bool, detail: serde_json::Value) -> Check {
    Check { name, passed, detail }
}

fn verdict_check(g: &GroupPresentation, expected: Verdict, opts: &DecisionOptions) -> Result<Check> {
    let r = g.decide(opts)?;
    Ok(check(
        "verdict",
        r.verdict == expected,
        json!({
            "presentation": g.name,
            "expected": expected,
            "verdict": r.verdict,
            "layers": r.layer_reports.iter().map(|l| l.trivial_weight_free).collect::<Vec<_>>(),
            "sampling": r.sampling,
            "warnings": r.warnings,
        }),
    ))
}

fn density_check(g: &GroupPresentation, expected: f64, opts: &DecisionOptions) -> Result<Check> {
    let group = SemidirectGroup::Vector(&g.compact);
    let d = ellipticity::elliptic_density(group, opts.samples, opts.seed, opts.translation_scale, opts.parallelism)?;
    Ok(check(
        "elliptic_density",
        d.fraction == expected && d.undetermined == 0,
        json!({ "expected": expected, "report": d }),
    ))
}

fn battery_check(g: &GroupPresentation, expected: bool, opts: &DecisionOptions) -> Result<Check> {
    let b = g.equivalence_battery(opts)?;
    Ok(check(
        "equivalence_battery",
        b.value == expected,
        json!({
            "expected": expected,
            "conditions": b.conditions.iter().map(|(k, c)| (k.clone(), c.holds)).collect::<std::collections::BTreeMap<_, _>>(),
        }),
    ))
}

fn permanence(g: &GroupPresentation, layer: usize, opts: &DecisionOptions) -> Result<Check> {
    let p = g.permanence_check(layer, opts)?;
    Ok(check("permanence", p.consistent, serde_json::to_value(&p).expect("serializable")))
}

fn rot2(opts: &DecisionOptions) -> Result<Vec<Check>> {
    let g = presentation("rot2")?;
    let center = SemidirectElement::new(vec![1.0, 0.0], vec![0.5], None)?;
    let local = ellipticity::local_elliptic_density(
        SemidirectGroup::Vector(&g.compact),
        &center,
        LOCAL_RADIUS,
        opts.samples,
        opts.seed,
        opts.parallelism,
    )?;
    Ok(vec![
        verdict_check(&g, Verdict::OpenlyAlmostElliptic, opts)?,
        density_check(&g, 1.0, opts)?,
        battery_check(&g, true, opts)?,
        check(
            "local_density_at_half_turn",
            local.fraction == 1.0 && local.undetermined == 0,
            serde_json::to_value(&local).expect("serializable"),
        ),
    ])
}

fn trivial_weight_entry(name: &str, opts: &DecisionOptions) -> Result<Vec<Check>> {
    let g = presentation(name)?;
    Ok(vec![
        verdict_check(&g, Verdict::NotAlmostElliptic, opts)?,
        density_check(&g, 0.0, opts)?,
        battery_check(&g, false, opts)?,
    ])
}

fn z2inv(opts: &DecisionOptions) -> Result<Vec<Check>> {
    let g = presentation("z2inv")?;
    let refused = match g.decide(opts) {
        Err(Error::DisconnectedCompactPart { components }) => json!({ "refused": true, "components": components }),
        Err(e) => return Err(e),
        Ok(r) => json!({ "refused": false, "verdict": r.verdict }),
    };
    let connected = GroupPresentation::vector(crate::CompactPart::connected(g.compact.torus.clone()));
    let weights = g.compact.torus.weights()?;
    let twf = !g.compact.torus.has_trivial_weight()?;
    let group = SemidirectGroup::Vector(&g.compact);
    // the reflection fixes (1, 0); conjugates of nearby reflections fix nearby lines
    let center = SemidirectElement::new(vec![1.0, 0.0], vec![0.0], Some(0))?;
    let local = ellipticity::local_elliptic_density(group, &center, LOCAL_RADIUS, opts.samples, opts.seed, opts.parallelism)?;
    // identity coset: elliptic almost surely; reflection coset: almost never
    let global = ellipticity::elliptic_density(group, opts.samples, opts.seed, opts.translation_scale, opts.parallelism)?;
    Ok(vec![
        check("decision_refused", refused["refused"] == json!(true), refused),
        check(
            "torus_trivial_weight_free",
            twf,
            serde_json::to_value(&weights).expect("serializable"),
        ),
        verdict_check(&connected, Verdict::OpenlyAlmostElliptic, opts)?,
        check(
            "local_density_at_reflection_fixed_point",
            local.fraction == 0.0 && local.undetermined == 0,
            serde_json::to_value(&local).expect("serializable"),
        ),
        check(
            "global_density_about_one_half",
            (global.fraction - 0.5).abs() <= 0.05 && global.undetermined == 0,
            serde_json::to_value(&global).expect("serializable"),
        ),
    ])
}

fn heis_rot(opts: &DecisionOptions) -> Result<Vec<Check>> {
    let g = presentation("heis_rot")?;
    let r = g.decide(opts)?;
    let layers: Vec<bool> = r.layer_reports.iter().map(|l| l.trivial_weight_free).collect();
    let complex = presentation("heis_rot_complex")?;
    Ok(vec![
        verdict_check(&g, Verdict::NotAlmostElliptic, opts)?,
        check(
            "layer_weights",
            layers == [true, false] && r.verdict == Verdict::from_bool(layers.iter().all(|&b| b)),
            serde_json::to_value(&r.layer_reports).expect("serializable"),
        ),
        permanence(&g, 1, opts)?,
        verdict_check(&complex, Verdict::OpenlyAlmostElliptic, opts)?,
        permanence(&complex, 1, opts)?,
    ])
}

fn e2_cover(opts: &DecisionOptions) -> Result<Vec<Check>> {
    let cover = presentation("e2_cover")?;
    let r = cover.decide(opts)?;
    let euclid = presentation("e2_euclid")?;
    Ok(vec![
        verdict_check(&cover, Verdict::NotAlmostElliptic, opts)?,
        check(
            "fixed_direction_flagged",
            !r.warnings.is_empty(),
            json!({ "warnings": r.warnings }),
        ),
        verdict_check(&euclid, Verdict::OpenlyAlmostElliptic, opts)?,
    ])
}

fn un_gl() -> Result<Vec<Check>> {
    let family: TiltFamily = serde_json::from_str(source("un_gl")?).map_err(|e| Error::Schema {
        path: "un_gl".into(),
        message: e.to_string(),
    })?;
    let kmax = family.kmax.unwrap_or(DEFAULT_KMAX);
    let rows = family.evaluate(kmax)?;
    let floor = 3f64.sqrt() - 1e-9;
    Ok(vec![
        check(
            "sup_at_least_sqrt3",
            rows.iter().all(|r| r.min_sup >= floor),
            json!({ "floor": floor, "rows": rows }),
        ),
        check(
            "growth_as_line_tilts",
            rows.iter().all(|r| r.increasing),
            json!({ "tilts": family.tilts, "kmax": kmax }),
        ),
    ])
}

fn su2(opts: &DecisionOptions) -> Result<Vec<Check>> {
    let g = presentation("su2")?;
    let ext = presentation("su2_r4")?;
    Ok(vec![
        verdict_check(&g, Verdict::OpenlyAlmostElliptic, opts)?,
        verdict_check(&ext, Verdict::OpenlyAlmostElliptic, opts)?,
        permanence(&ext, 0, opts)?,
    ])
}

fn sl2r(opts: &DecisionOptions) -> Result<Vec<Check>> {
    let g = presentation("sl2r")?;
    let r = g.decide(opts)?;
    Ok(vec![
        verdict_check(&g, Verdict::NotAlmostElliptic, opts)?,
        check(
            "semisimple_not_compact",
            r.semisimple_compact == Some(false),
            serde_json::to_value(&r.conditions["a"]).expect("serializable"),
        ),
    ])
}

fn summary(name: &str) -> &'static str {
    match name {
        "rot2" => "R^2 rotated by the circle: no trivial weight, openly almost-elliptic",
        "triv_line" => "R^2 rotated plus a fixed line: trivial weight, not almost-elliptic",
        "mixed3" => "rank-3 torus on R^7 with a fixed line: trivial weight, not almost-elliptic",
        "z2inv" => "R^2 rotated by the circle and reflected: the decision refuses, and near a reflection fixing v no element is elliptic",
        "heis_rot" => "Heisenberg group rotated in (x, y): the center has weight 0; its complex analogue has weights 1, 1, 2",
        "e2_cover" => "universal cover of the Euclidean motion group of the plane: not almost-elliptic without a compact rotation factor",
        "un_gl" => "unitary elements on a line tilting toward a hyperplane: power norms stay at least sqrt(3) and blow up",
        "su2" => "compact su(2), and su(2) acting on C^2 with a torus of weights 1 and -1",
        "sl2r" => "sl(2, R): non-compact semisimple, not almost-elliptic",
        _ => "",
    }
}

pub fn run_entry(name: &str, opts: &DecisionOptions) -> Result<EntryReport> {
    let canonical = ENTRIES
        .iter()
        .find(|n| **n == name)
        .ok_or_else(|| Error::UnknownGalleryEntry(name.to_string()))?;
    let checks = match *canonical {
        "rot2" => rot2(opts)?,
        "triv_line" | "mixed3" => trivial_weight_entry(canonical, opts)?,
        "z2inv" => z2inv(opts)?,
        "heis_rot" => heis_rot(opts)?,
        "e2_cover" => e2_cover(opts)?,
        "un_gl" => un_gl()?,
        "su2" => su2(opts)?,
        "sl2r" => sl2r(opts)?,
        _ => unreachable!("ENTRIES is exhaustive"),
    };
    Ok(EntryReport {
        name: canonical,
        summary: summary(canonical),
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

/// Runs one entry, or all of them when `name` is `None`.
pub fn run(name: Option<&str>, opts: &DecisionOptions) -> Result<GalleryReport> {
    let entries = match name {
        Some(n) => vec![run_entry(n, opts)?],
        None => ENTRIES.iter().map(|n| run_entry(n, opts)).collect::<Result<Vec<_>>>()?,
    };
    Ok(GalleryReport {
        passed: entries.iter().all(|e| e.passed),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_source_parses() {
        for (name, _) in SOURCES {
            if name == "un_gl" {
                continue;
            }
            presentation(name).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn unknown_entry() {
        assert!(matches!(
            run(Some("unknown"), &DecisionOptions::default()),
            Err(Error::UnknownGalleryEntry(_))
        ));
    }

    #[test]
    fn tilt_family_rows() {
        let family = TiltFamily {
            n: 3,
            thetas: vec![1.0 / 3.0],
            tilts: vec![1.0, 0.1],
            kmax: None,
        };
        let rows = family.evaluate(3).unwrap();
        assert!(rows[0].increasing);
        assert!(rows[0].min_sup >= 3f64.sqrt() - 1e-9);
    }
}
