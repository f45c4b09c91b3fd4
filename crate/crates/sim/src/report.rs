//! CSV output shared by `run` and `experiment`.

use std::io::Write;

use broker_core::pipeline::Comparison;

pub const CSV_HEADER: [&str; 11] = [
    "seed",
    "policy",
    "admitted",
    "total",
    "admission_rate",
    "energy_cost",
    "network_cost",
    "total_cost",
    "norm_admission",
    "norm_cost",
    "wall_time_s",
];

/// One CSV line. Counts are stored as `f64` so mean rows fit the same shape.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub seed: String,
    pub policy: String,
    pub admitted: f64,
    pub total: f64,
    pub admission_rate: f64,
    pub energy_cost: f64,
    pub network_cost: f64,
    pub total_cost: f64,
    pub norm_admission: f64,
    pub norm_cost: f64,
    pub wall_time_s: f64,
}

impl CsvRow {
    pub fn from_comparison(seed: impl ToString, policy: &str, c: &Comparison) -> Self {
        let p = &c.proposed;
        Self {
            seed: seed.to_string(),
            policy: policy.to_string(),
            admitted: p.admitted as f64,
            total: p.total as f64,
            admission_rate: p.admission_rate,
            energy_cost: p.energy_cost,
            network_cost: p.network_cost,
            total_cost: p.total_cost,
            norm_admission: c.normalized_admission,
            norm_cost: c.normalized_cost,
            wall_time_s: p.wall_time_s,
        }
    }

    /// Column-wise mean of `rows`, labelled `mean`.
    pub fn mean(rows: &[CsvRow]) -> Option<Self> {
        let first = rows.first()?;
        let n = rows.len() as f64;
        let avg = |f: fn(&CsvRow) -> f64| rows.iter().map(f).sum::<f64>() / n;
        Some(Self {
            seed: "mean".to_string(),
            policy: first.policy.clone(),
            admitted: avg(|r| r.admitted),
            total: avg(|r| r.total),
            admission_rate: avg(|r| r.admission_rate),
            energy_cost: avg(|r| r.energy_cost),
            network_cost: avg(|r| r.network_cost),
            total_cost: avg(|r| r.total_cost),
            norm_admission: avg(|r| r.norm_admission),
            norm_cost: avg(|r| r.norm_cost),
            wall_time_s: avg(|r| r.wall_time_s),
        })
    }

    fn record(&self) -> [String; 11] {
        [
            self.seed.clone(),
            self.policy.clone(),
            self.admitted.to_string(),
            self.total.to_string(),
            self.admission_rate.to_string(),
            self.energy_cost.to_string(),
            self.network_cost.to_string(),
            self.total_cost.to_string(),
            self.norm_admission.to_string(),
            self.norm_cost.to_string(),
            self.wall_time_s.to_string(),
        ]
    }
}

pub fn write_csv<W: Write>(rows: &[CsvRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(row.record())?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(rows: &[CsvRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}
