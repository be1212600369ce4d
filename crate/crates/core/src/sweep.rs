//! Parameter sweeps over `(d, a, b, n)` boxes with deterministic output.

use std::fmt::Write as _;
use std::ops::RangeInclusive;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{ratio_convergence, symplectic_volume, BernoulliConvention, ExactRational};
use crate::counting::{count_brute_force, count_closed_form, count_slice_sum, ensure_cell_budget, CountMethod, CountResult};
use crate::decimal;
use crate::error::{Error, Result};
use crate::polytope::{build_hirzebruch_polytope, FibrationParams};
use crate::quantization::{quantization_dimension, QuantizationRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    #[default]
    Csv,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub d: RangeInclusive<u64>,
    pub a: RangeInclusive<u64>,
    pub b: RangeInclusive<u64>,
    pub n: RangeInclusive<u64>,
    /// Counting methods evaluated for every row, in output column order.
    pub methods: Vec<CountMethod>,
    pub format: OutputFormat,
    /// Brute-force budget per polytope; `None` disables the guard.
    pub max_cells: Option<u64>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, r) in [("d", &self.d), ("a", &self.a), ("b", &self.b), ("n", &self.n)] {
            if r.is_empty() {
                return Err(Error::InvalidParameter(format!(
                    "range for {name} is empty ({}..={})",
                    r.start(),
                    r.end()
                )));
            }
        }
        if *self.d.start() == 0 {
            return Err(Error::InvalidParameter("d range must start at 1 or above".into()));
        }
        let mut seen = self.methods.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.methods.len() {
            return Err(Error::InvalidParameter("duplicate counting method".into()));
        }
        Ok(())
    }

    /// Parameter tuples sorted by `(d, a, b, n)`.
    pub fn params(&self) -> Result<Vec<FibrationParams>> {
        let mut out = Vec::new();
        for d in self.d.clone() {
            for a in self.a.clone() {
                for b in self.b.clone() {
                    for n in self.n.clone() {
                        out.push(FibrationParams::new(d, a, b, n)?);
                    }
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(flatten)]
    pub record: QuantizationRecord,
    #[serde(with = "decimal::rational")]
    pub volume: ExactRational,
    /// `|Q/Vol − series|` under `B_1 = +1/2` at the largest twist in the
    /// sweep; absent when `b = 0` or that twist is 0.
    #[serde(with = "optional_rational")]
    pub ratio_gap: Option<ExactRational>,
    pub counts: Vec<CountResult>,
}

mod optional_rational {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<ExactRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match v {
            Some(r) => decimal::RationalJson(r.clone()).serialize(s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<ExactRational>, D::Error> {
        Ok(Option::<decimal::RationalJson>::deserialize(d)?.map(|r| r.0))
    }
}

impl SweepRow {
    /// Every requested count equals the quantization dimension.
    pub fn methods_agree(&self) -> bool {
        self.counts.iter().all(|c| c.value == self.record.dimension)
    }
}

fn count_with(p: FibrationParams, method: CountMethod, max_cells: Option<u64>) -> Result<CountResult> {
    match method {
        CountMethod::BruteForce => {
            let poly = build_hirzebruch_polytope(p);
            if let Some(limit) = max_cells {
                ensure_cell_budget(&poly, limit)?;
            }
            count_brute_force(&poly)
        }
        CountMethod::SliceSum => Ok(count_slice_sum(p)),
        CountMethod::ClosedForm => Ok(count_closed_form(p)),
    }
}

pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let n_max = *spec.n.end();
    spec.params()?
        .into_par_iter()
        .map(|p| {
            let ratio_gap = if p.b() == 0 || n_max == 0 {
                None
            } else {
                let rows = ratio_convergence(p.a(), p.b(), p.d(), &[n_max], BernoulliConvention::BPlus)?;
                rows.into_iter().next().map(|r| r.gap)
            };
            let counts = spec
                .methods
                .iter()
                .map(|&m| count_with(p, m, spec.max_cells))
                .collect::<Result<Vec<_>>>()?;
            Ok(SweepRow {
                record: quantization_dimension(p),
                volume: symplectic_volume(p),
                ratio_gap,
                counts,
            })
        })
        .collect()
}

fn decimal(v: &BigUint) -> String {
    v.to_str_radix(10)
}

/// CSV with header `d,a,b,n,dimension,volume_num,volume_den,gap_num,gap_den`
/// followed by one `count_<method>` column per requested method. LF endings.
pub fn render_csv(rows: &[SweepRow], methods: &[CountMethod]) -> String {
    let mut out = String::from("d,a,b,n,dimension,volume_num,volume_den,gap_num,gap_den");
    for m in methods {
        write!(out, ",count_{m}").expect("writing to a String");
    }
    out.push('\n');
    for row in rows {
        let p = row.record.params;
        let (gap_num, gap_den) = match &row.ratio_gap {
            Some(g) => (g.numer().to_string(), g.denom().to_string()),
            None => (String::new(), String::new()),
        };
        write!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            p.d(),
            p.a(),
            p.b(),
            p.n(),
            decimal(&row.record.dimension),
            row.volume.numer(),
            row.volume.denom(),
            gap_num,
            gap_den
        )
        .expect("writing to a String");
        for c in &row.counts {
            write!(out, ",{}", decimal(&c.value)).expect("writing to a String");
        }
        out.push('\n');
    }
    out
}

pub fn render_json(rows: &[SweepRow]) -> String {
    let mut s = serde_json::to_string_pretty(rows).expect("sweep rows serialize");
    s.push('\n');
    s
}

pub fn render(rows: &[SweepRow], spec: &SweepSpec) -> String {
    match spec.format {
        OutputFormat::Csv => render_csv(rows, &spec.methods),
        OutputFormat::Json => render_json(rows),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(format: OutputFormat) -> SweepSpec {
        SweepSpec {
            d: 1..=1,
            a: 0..=2,
            b: 1..=2,
            n: 0..=3,
            methods: vec![CountMethod::SliceSum, CountMethod::BruteForce],
            format,
            max_cells: Some(1_000_000),
        }
    }

    #[test]
    fn row_count_and_order() {
        let rows = run_sweep(&spec(OutputFormat::Csv)).unwrap();
        assert_eq!(rows.len(), 24);
        let keys: Vec<_> = rows.iter().map(|r| r.record.params).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert!(rows.iter().all(SweepRow::methods_agree));
    }

    #[test]
    fn csv_is_stable() {
        let s = spec(OutputFormat::Csv);
        let first = render(&run_sweep(&s).unwrap(), &s);
        let second = render(&run_sweep(&s).unwrap(), &s);
        assert_eq!(first, second);
        let mut lines = first.lines();
        assert_eq!(
            lines.next().unwrap(),
            "d,a,b,n,dimension,volume_num,volume_den,gap_num,gap_den,count_slice_sum,count_brute_force"
        );
        // (d=1,a=0,b=1,n=0): Q = 2, Vol = 0, gap at n=3 is 4/3
        assert_eq!(lines.next().unwrap(), "1,0,1,0,2,0,1,4,3,2,2");
        assert_eq!(first.lines().count(), 25);
    }

    #[test]
    fn json_rows_are_records() {
        let s = spec(OutputFormat::Json);
        let out = render(&run_sweep(&s).unwrap(), &s);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let arr = v.as_array().unwrap();
        assert_eq!(arr.len(), 24);
        for obj in arr {
            let rec: QuantizationRecord = serde_json::from_value(obj.clone()).unwrap();
            assert_eq!(obj["dimension"].as_str().unwrap(), rec.dimension.to_string());
        }
    }

    #[test]
    fn gap_absent_without_fiber() {
        let s = SweepSpec {
            b: 0..=0,
            ..spec(OutputFormat::Csv)
        };
        let rows = run_sweep(&s).unwrap();
        assert!(rows.iter().all(|r| r.ratio_gap.is_none()));
    }

    #[test]
    fn invalid_specs() {
        #[allow(clippy::reversed_empty_ranges)]
        let bad = SweepSpec {
            a: 3..=1,
            ..spec(OutputFormat::Csv)
        };
        assert!(run_sweep(&bad).is_err());
        let bad = SweepSpec {
            d: 0..=1,
            ..spec(OutputFormat::Csv)
        };
        assert!(run_sweep(&bad).is_err());
        let tight = SweepSpec {
            max_cells: Some(3),
            ..spec(OutputFormat::Csv)
        };
        assert!(matches!(run_sweep(&tight), Err(Error::ResourceLimit(_))));
    }
}
