//! Pairwise trajectory comparison: max and RMS deviations over a window.

use spinbath::{Method, TrajectoryRecord};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deviation {
    pub max: f64,
    pub rms: f64,
}

#[derive(Debug, Clone)]
pub struct PairReport {
    pub a: Method,
    pub b: Method,
    /// None when either record has no finite coherence (the largen method).
    pub re_c: Option<Deviation>,
    pub im_c: Option<Deviation>,
    pub population: Deviation,
}

#[derive(Debug, Clone)]
pub struct MethodTiming {
    pub method: Method,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub window: (f64, f64),
    pub pairs: Vec<PairReport>,
    pub timings: Vec<MethodTiming>,
}

fn deviation(xs: &[f64], ys: &[f64], keep: &[bool]) -> Option<Deviation> {
    let mut max = 0.0f64;
    let mut sum_sq = 0.0f64;
    let mut count = 0usize;
    for ((&x, &y), &k) in xs.iter().zip(ys).zip(keep) {
        if !k {
            continue;
        }
        if !x.is_finite() || !y.is_finite() {
            return None;
        }
        let d = (x - y).abs();
        max = max.max(d);
        sum_sq += d * d;
        count += 1;
    }
    if count == 0 {
        return None;
    }
    Some(Deviation {
        max,
        rms: (sum_sq / count as f64).sqrt(),
    })
}

/// Compare every record pair over `window` (records share the time grid).
pub fn build_report(
    records: &[TrajectoryRecord],
    timings: Vec<MethodTiming>,
    window: (f64, f64),
) -> ComparisonReport {
    let mut pairs = Vec::new();
    for i in 0..records.len() {
        for j in i + 1..records.len() {
            let (a, b) = (&records[i], &records[j]);
            let keep: Vec<bool> = a
                .times
                .iter()
                .map(|&t| t >= window.0 && t <= window.1)
                .collect();
            pairs.push(PairReport {
                a: a.method,
                b: b.method,
                re_c: deviation(&a.coherence_re, &b.coherence_re, &keep),
                im_c: deviation(&a.coherence_im, &b.coherence_im, &keep),
                population: deviation(&a.population, &b.population, &keep)
                    .unwrap_or(Deviation { max: 0.0, rms: 0.0 }),
            });
        }
    }
    ComparisonReport {
        window,
        pairs,
        timings,
    }
}

impl ComparisonReport {
    /// Stable text rendering (timings last; they are wall-clock and vary).
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "window = {:.6},{:.6}\n",
            self.window.0, self.window.1
        ));
        let fmt = |d: Option<Deviation>| match d {
            Some(d) => format!("max={:.6e} rms={:.6e}", d.max, d.rms),
            None => "n/a".to_string(),
        };
        for p in &self.pairs {
            out.push_str(&format!(
                "pair {}/{}: re_C [{}] im_C [{}] P_plus [{}]\n",
                p.a,
                p.b,
                fmt(p.re_c),
                fmt(p.im_c),
                fmt(Some(p.population)),
            ));
        }
        for t in &self.timings {
            out.push_str(&format!("timing {} = {:.3}s\n", t.method, t.seconds));
        }
        out
    }
}
