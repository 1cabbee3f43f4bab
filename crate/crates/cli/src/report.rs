//! Benchmark rows and CSV formatting. All numbers use '.' as the decimal
//! separator and '\n' line endings regardless of locale.

use tscflp::evaluator::rpd;
use tscflp::Money;

pub const CSV_HEADER: &str = "class,instance,lb,z_min,z_avg,rpd_min,rpd_avg,time_s";

/// One solved instance: best/average objective over the runs, deviations
/// against the LP bound, and summed wall time.
#[derive(Debug, Clone)]
pub struct BenchmarkRow {
    pub class_label: String,
    pub instance_index: usize,
    pub lb: f64,
    pub z_min: Money,
    pub z_avg: f64,
    pub rpd_min: f64,
    pub rpd_avg: f64,
    pub time_s: f64,
    pub runs: usize,
    pub seed_base: u64,
}

impl BenchmarkRow {
    pub fn from_objectives(
        class_label: String,
        instance_index: usize,
        lb: f64,
        objectives: &[Money],
        time_s: f64,
        seed_base: u64,
    ) -> anyhow::Result<Self> {
        anyhow::ensure!(!objectives.is_empty(), "no runs recorded");
        let z_min = *objectives.iter().min().expect("nonempty");
        let z_avg = objectives.iter().map(|&z| z as f64).sum::<f64>() / objectives.len() as f64;
        let rpd_min = rpd(z_min as f64, lb)?;
        let rpd_avg = rpd(z_avg, lb)?;
        Ok(Self {
            class_label,
            instance_index,
            lb,
            z_min,
            z_avg,
            rpd_min,
            rpd_avg,
            time_s,
            runs: objectives.len(),
            seed_base,
        })
    }

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{:.1},{},{:.1},{:.2},{:.2},{:.2}",
            self.class_label,
            self.instance_index,
            self.lb,
            self.z_min,
            self.z_avg,
            self.rpd_min,
            self.rpd_avg,
            self.time_s
        )
    }
}

/// The table's trailing average line: column-wise means over the data rows.
pub fn average_line(rows: &[BenchmarkRow]) -> String {
    let n = rows.len() as f64;
    let mean = |f: fn(&BenchmarkRow) -> f64| rows.iter().map(f).sum::<f64>() / n;
    format!(
        "avg,,{:.1},{:.1},{:.1},{:.2},{:.2},{:.2}",
        mean(|r| r.lb),
        mean(|r| r.z_min as f64),
        mean(|r| r.z_avg),
        mean(|r| r.rpd_min),
        mean(|r| r.rpd_avg),
        mean(|r| r.time_s),
    )
}

/// Full CSV document: header, data rows, average line.
pub fn csv_document(rows: &[BenchmarkRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.csv_line());
        out.push('\n');
    }
    if !rows.is_empty() {
        out.push_str(&average_line(rows));
        out.push('\n');
    }
    out
}
