//! Three-way classification of a solution sequence: locally bounded,
//! uniformly collapsing to `-∞`, or concentrating at finitely many points.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::green_disk::QuadratureSpec;
use crate::scalar::{ls_slope, Point, Real};

use super::{mass_on, CompactRegion, ScalarField, Weight};

/// Cutoffs for deciding an asymptotic alternative on a finite sequence.
///
/// The absolute levels `big` and `peak` alone cannot separate the cases at
/// desk-scale indices (a bubble peak is only `log 8i²`), so each region's
/// `sup` is also fitted against `log i` over the last half of the sequence
/// and slopes beyond `trend_tol` count as growth or decay.
#[derive(Debug, Clone, PartialEq)]
pub struct Thresholds<T> {
    pub big: T,
    pub peak: T,
    pub merge_radius: T,
    pub mass_tol: T,
    /// Relative mass change between consecutive shrink radii that counts as
    /// stabilised.
    pub stabilization: T,
    pub shrink_radii: Vec<T>,
    pub trend_tol: T,
}

impl<T: Real> Default for Thresholds<T> {
    fn default() -> Self {
        Self {
            big: T::lit(50.0),
            peak: T::lit(10.0),
            merge_radius: T::lit(0.05),
            mass_tol: T::lit(0.5),
            stabilization: T::lit(0.01),
            shrink_radii: vec![T::lit(0.2), T::lit(0.1), T::lit(0.05)],
            trend_tol: T::lit(0.25),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlowupCase {
    Bounded,
    UniformCollapse,
    Concentration,
    /// Mixed or unresolved evidence; see the report notes.
    Indeterminate,
}

impl fmt::Display for BlowupCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Bounded => "Bounded",
            Self::UniformCollapse => "UniformCollapse",
            Self::Concentration => "Concentration",
            Self::Indeterminate => "Indeterminate",
        })
    }
}

impl FromStr for BlowupCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Bounded" => Ok(Self::Bounded),
            "UniformCollapse" => Ok(Self::UniformCollapse),
            "Concentration" => Ok(Self::Concentration),
            "Indeterminate" => Ok(Self::Indeterminate),
            other => Err(Error::Parse(format!("unknown case `{other}`"))),
        }
    }
}

/// Per-region `sup`/`inf` table with the fitted trend of `sup`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionTrend<T> {
    pub region: CompactRegion<T>,
    pub sups: Vec<T>,
    pub infs: Vec<T>,
    pub slope: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlowupClassification<T> {
    pub case: BlowupCase,
    pub points: Vec<Point<T>>,
    pub masses: Vec<T>,
    pub diagnostics: Vec<RegionTrend<T>>,
    pub notes: Vec<String>,
}

impl<T: Real> BlowupClassification<T> {
    /// Rows `case,k,x_k,y_k,alpha_k` under a `# schema=` line.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("# schema=classification/1\ncase,k,x_k,y_k,alpha_k\n");
        if self.points.is_empty() {
            s.push_str(&format!("{},,,,\n", self.case));
        }
        for (k, (p, m)) in self.points.iter().zip(&self.masses).enumerate() {
            s.push_str(&format!(
                "{},{},{:.16e},{:.16e},{:.16e}\n",
                self.case,
                k,
                p.re.as_f64(),
                p.im.as_f64(),
                m.as_f64()
            ));
        }
        s
    }

    /// Key-value sections mirroring [`Self::to_csv`], followed by the
    /// per-region trend table and notes.
    pub fn to_text(&self) -> String {
        let mut s = format!("# schema=classification/1\n[classification]\ncase={}\n", self.case);
        for (k, (p, m)) in self.points.iter().zip(&self.masses).enumerate() {
            s.push_str(&format!(
                "\n[point={k}]\nx_k={:.16e}\ny_k={:.16e}\nalpha_k={:.16e}\n",
                p.re.as_f64(),
                p.im.as_f64(),
                m.as_f64()
            ));
        }
        for d in &self.diagnostics {
            s.push_str(&format!("\n[region={}]\nslope={:.16e}\n", d.region, d.slope.as_f64()));
            let join = |v: &[T]| v.iter().map(|x| format!("{:.16e}", x.as_f64())).collect::<Vec<_>>().join(",");
            s.push_str(&format!("sup={}\ninf={}\n", join(&d.sups), join(&d.infs)));
        }
        for n in &self.notes {
            s.push_str(&format!("note={n}\n"));
        }
        s
    }

    /// Parses [`Self::to_csv`] output back into `(case, points, masses)`.
    pub fn parse_csv(text: &str) -> Result<(BlowupCase, Vec<Point<T>>, Vec<T>)> {
        let mut case = None;
        let mut points = Vec::new();
        let mut masses = Vec::new();
        for line in text.lines().filter(|l| !l.starts_with('#') && !l.starts_with("case,")) {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 5 {
                return Err(Error::Parse(format!("expected 5 columns in `{line}`")));
            }
            case = Some(cols[0].parse()?);
            if cols[1].is_empty() {
                continue;
            }
            let num = |s: &str| s.parse::<f64>().map(T::lit).map_err(|e| Error::Parse(format!("`{s}`: {e}")));
            points.push(Point::new(num(cols[2])?, num(cols[3])?));
            masses.push(num(cols[4])?);
        }
        Ok((case.ok_or_else(|| Error::Parse("no rows".into()))?, points, masses))
    }
}

/// Classifies `seq` (pairs of index and member, in increasing index).
///
/// Bounded: every region's `sup` stays in `[-big, big]` over the last half
/// without trend. Uniform collapse: every region's `sup` decreases over the
/// last half (with a trend below `-trend_tol`, or below `-big` at the end).
/// Concentration: some region's `sup` grows or exceeds `big`; points are
/// then the local maxima of the last member above `peak` whose mass in the
/// shrinking balls stabilises, merged within `merge_radius`. Anything else
/// is `Indeterminate`.
pub fn classify_sequence<T: Real, U: ScalarField<T>>(
    seq: &[(T, U)],
    regions: &[CompactRegion<T>],
    thr: &Thresholds<T>,
    q: &QuadratureSpec<T>,
) -> Result<BlowupClassification<T>> {
    if seq.len() < 4 {
        return Err(Error::Input(format!("classification needs at least 4 members, got {}", seq.len())));
    }
    if regions.is_empty() {
        return Err(Error::Input("classification needs at least one region".into()));
    }
    if seq.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::Input("sequence indices must be strictly increasing".into()));
    }
    let half = seq.len() / 2;
    let logs: Vec<T> = seq[half..].iter().map(|(i, _)| i.ln()).collect();
    let mut diagnostics = Vec::with_capacity(regions.len());
    for k in regions {
        let mut sups = Vec::with_capacity(seq.len());
        let mut infs = Vec::with_capacity(seq.len());
        for (_, u) in seq {
            let (lo, hi) = u.extrema_on(k).map_err(|e| Error::Input(format!("member does not cover {k}: {e}")))?;
            infs.push(lo);
            sups.push(hi);
        }
        let slope = ls_slope(&logs, &sups[half..]);
        diagnostics.push(RegionTrend { region: *k, sups, infs, slope });
    }

    let tail = |d: &RegionTrend<T>| d.sups[half..].to_vec();
    let grows = diagnostics.iter().any(|d| d.slope > thr.trend_tol || *d.sups.last().unwrap() > thr.big);
    let collapses = diagnostics.iter().all(|d| {
        let t = tail(d);
        let monotone = t.windows(2).all(|w| w[1] <= w[0]);
        (monotone && d.slope < -thr.trend_tol) || *t.last().unwrap() < -thr.big
    });
    let bounded = diagnostics
        .iter()
        .all(|d| tail(d).iter().all(|s| s.abs() <= thr.big) && d.slope.abs() <= thr.trend_tol);

    let mut notes = Vec::new();
    let mut out = BlowupClassification {
        case: BlowupCase::Indeterminate,
        points: Vec::new(),
        masses: Vec::new(),
        diagnostics,
        notes: Vec::new(),
    };
    if grows {
        let last = &seq.last().unwrap().1;
        let (points, masses) = concentration_points(last, thr, q, &mut notes)?;
        if points.is_empty() {
            notes.push("sup grows but no peak has a stabilised mass".into());
        } else {
            out.case = BlowupCase::Concentration;
            out.points = points;
            out.masses = masses;
        }
    } else if collapses {
        out.case = BlowupCase::UniformCollapse;
    } else if bounded {
        out.case = BlowupCase::Bounded;
    } else {
        notes.push("region trends are mixed".into());
    }
    out.notes = notes;
    Ok(out)
}

fn concentration_points<T: Real, U: ScalarField<T>>(
    u: &U,
    thr: &Thresholds<T>,
    q: &QuadratureSpec<T>,
    notes: &mut Vec<String>,
) -> Result<(Vec<Point<T>>, Vec<T>)> {
    let mut kept: Vec<Point<T>> = Vec::new();
    for (p, _) in u.peak_candidates(thr.peak) {
        if kept.iter().all(|k| (*k - p).norm() >= thr.merge_radius) {
            kept.push(p);
        }
    }
    let floor = T::lit(4.0) * T::PI() - thr.mass_tol;
    let mut points = Vec::new();
    let mut masses = Vec::new();
    for p in kept {
        let mut ms = Vec::new();
        for &rho in &thr.shrink_radii {
            if u.contains_ball(p, rho) {
                ms.push(mass_on(u, &Weight::Natural, &CompactRegion::ball(p, rho)?, q)?);
            }
        }
        let stable = ms
            .windows(2)
            .find(|w| (w[0] - w[1]).abs() <= thr.stabilization * w[0].abs())
            .map(|w| w[1]);
        match stable {
            Some(m) if m >= floor => {
                points.push(p);
                masses.push(m);
            }
            Some(m) => notes.push(format!("peak at ({}, {}) carries only {m}", p.re, p.im)),
            None => notes.push(format!("mass at ({}, {}) did not stabilise", p.re, p.im)),
        }
    }
    Ok((points, masses))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::RadialProfile;
    use crate::pde_solver::{RectGrid, SampledField};
    use std::f64::consts::PI;

    type P = RadialProfile<f64>;

    fn regions() -> Vec<CompactRegion<f64>> {
        vec![
            CompactRegion::ball(Point::new(0.0, 0.0), 0.5).unwrap(),
            CompactRegion::annulus(0.5, 0.9).unwrap(),
        ]
    }

    fn run<U: ScalarField<f64>>(seq: &[(f64, U)]) -> BlowupClassification<f64> {
        classify_sequence(seq, &regions(), &Thresholds::default(), &QuadratureSpec::default()).unwrap()
    }

    #[test]
    fn bubbles_concentrate_with_one_quantum() {
        let seq: Vec<_> = (2..=8).map(|k| (2f64.powi(k), P::bubble(2f64.powi(k)).unwrap())).collect();
        let c = run(&seq);
        assert_eq!(c.case, BlowupCase::Concentration, "{:?}", c.notes);
        assert_eq!(c.points.len(), 1);
        assert!((c.masses[0] - 8.0 * PI).abs() <= 0.02 * 8.0 * PI);
    }

    #[test]
    fn remark_sequence_collapses() {
        let seq: Vec<_> = (2..=8).map(|k| (2f64.powi(k), P::remark(2f64.powi(k)).unwrap())).collect();
        assert_eq!(run(&seq).case, BlowupCase::UniformCollapse);
    }

    fn constant_seq(c: f64) -> Vec<(f64, SampledField<f64>)> {
        let g = RectGrid::centered_square(1.0f64, 33).unwrap();
        (1..=6).map(|i| (i as f64, SampledField::from_fn_rect(g, |_| c, "").unwrap())).collect()
    }

    #[test]
    fn constant_sequences_are_bounded_under_shifts() {
        for c in [0.0, 1.0, -1.0] {
            assert_eq!(run(&constant_seq(c)).case, BlowupCase::Bounded);
        }
    }

    #[test]
    fn mixed_trends_are_indeterminate() {
        // Flat in one region, decaying in the other.
        let g = RectGrid::centered_square(1.0f64, 33).unwrap();
        let seq: Vec<_> = (1..=6)
            .map(|i| {
                let i = i as f64;
                (i, SampledField::from_fn_rect(g, move |p| if p.norm() > 0.3 { -3.0 * i.ln() } else { 0.0 }, "").unwrap())
            })
            .collect();
        let c = run(&seq);
        assert_eq!(c.case, BlowupCase::Indeterminate);
        assert!(!c.notes.is_empty());
    }

    #[test]
    fn input_errors() {
        let short: Vec<_> = (1..=3).map(|i| (i as f64, P::bubble(i as f64).unwrap())).collect();
        assert!(classify_sequence(&short, &regions(), &Thresholds::default(), &QuadratureSpec::default()).is_err());
        let seq: Vec<_> = (1..=4).map(|i| (i as f64, P::annulus(i as f64).unwrap())).collect();
        let inner = [CompactRegion::ball(Point::new(0.0, 0.0), 0.5).unwrap()];
        assert!(matches!(
            classify_sequence(&seq, &inner, &Thresholds::default(), &QuadratureSpec::default()),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn csv_round_trip() {
        let seq: Vec<_> = (2..=8).map(|k| (2f64.powi(k), P::bubble(2f64.powi(k)).unwrap())).collect();
        let c = run(&seq);
        let (case, pts, ms) = BlowupClassification::<f64>::parse_csv(&c.to_csv()).unwrap();
        assert_eq!(case, c.case);
        assert_eq!(pts, c.points);
        assert_eq!(ms, c.masses);
    }
}
