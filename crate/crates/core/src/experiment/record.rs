use std::io::Write;

use serde::Serialize;

use super::config::ExperimentKind;
use crate::error::Result;

/// Version tag of the CSV column layout in [`CSV_HEADER`].
pub const CSV_SCHEMA: &str = "nrgraph-records-v1";

pub const CSV_HEADER: [&str; 25] = [
    "experiment",
    "n",
    "tau",
    "gamma",
    "replication",
    "seed",
    "surviving_vertices",
    "giant_size",
    "giant_fraction",
    "baseline_giant_size",
    "retention",
    "pairs",
    "unreachable_pairs",
    "mean_distance",
    "max_distance",
    "baseline_mean_distance",
    "predicted_bound",
    "predicted_giant_fraction",
    "predicted_scale",
    "tier_size",
    "tier_components",
    "tier_diameter",
    "statistic",
    "statistic_aux",
    "distances",
];

/// Measurements of one replication. Optional fields are empty CSV cells.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub experiment: ExperimentKind,
    pub n: u64,
    pub tau: f64,
    pub gamma: Option<f64>,
    pub replication: usize,
    pub seed: u64,
    /// Vertices of the graph measured (after any deletion).
    pub surviving_vertices: usize,
    pub giant_size: usize,
    /// Giant size over surviving vertices.
    pub giant_fraction: f64,
    /// Giant size of the undamaged graph, for deletion experiments.
    pub baseline_giant_size: Option<usize>,
    /// Finite hop distances between sampled giant pairs.
    pub distance_samples: Vec<u32>,
    /// Sampled pairs with no path; never mixed into distance statistics.
    pub unreachable_pairs: usize,
    pub baseline_mean_distance: Option<f64>,
    pub predicted_bound: Option<f64>,
    pub predicted_giant_fraction: Option<f64>,
    pub predicted_scale: Option<f64>,
    pub tier_size: Option<usize>,
    pub tier_components: Option<usize>,
    pub tier_diameter: Option<u32>,
    /// Coupling: binned TV. Concentration: upper-set ratio.
    pub statistic: Option<f64>,
    /// Coupling: split-half TV of the graph sample. Concentration: low-tier ratio.
    pub statistic_aux: Option<f64>,
    /// Not written to CSV, so reruns stay byte-identical.
    #[serde(skip)]
    pub wall_time_ms: f64,
}

impl ExperimentRecord {
    pub fn new(experiment: ExperimentKind, n: u64, tau: f64, replication: usize, seed: u64) -> Self {
        ExperimentRecord {
            experiment,
            n,
            tau,
            gamma: None,
            replication,
            seed,
            surviving_vertices: 0,
            giant_size: 0,
            giant_fraction: 0.0,
            baseline_giant_size: None,
            distance_samples: Vec::new(),
            unreachable_pairs: 0,
            baseline_mean_distance: None,
            predicted_bound: None,
            predicted_giant_fraction: None,
            predicted_scale: None,
            tier_size: None,
            tier_components: None,
            tier_diameter: None,
            statistic: None,
            statistic_aux: None,
            wall_time_ms: 0.0,
        }
    }

    pub fn set_giant(&mut self, giant_size: usize, surviving_vertices: usize) {
        self.giant_size = giant_size;
        self.surviving_vertices = surviving_vertices;
        self.giant_fraction = if surviving_vertices == 0 {
            0.0
        } else {
            giant_size as f64 / surviving_vertices as f64
        };
    }

    pub fn retention(&self) -> Option<f64> {
        self.baseline_giant_size
            .map(|b| if b == 0 { 0.0 } else { self.giant_size as f64 / b as f64 })
    }

    pub fn mean_distance(&self) -> Option<f64> {
        mean_of(&self.distance_samples)
    }

    pub fn max_distance(&self) -> Option<u32> {
        self.distance_samples.iter().copied().max()
    }

    fn csv_fields(&self) -> Vec<String> {
        fn opt<T: ToString>(v: Option<T>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        let distances = self
            .distance_samples
            .iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join(";");
        vec![
            self.experiment.as_str().to_string(),
            self.n.to_string(),
            self.tau.to_string(),
            opt(self.gamma),
            self.replication.to_string(),
            self.seed.to_string(),
            self.surviving_vertices.to_string(),
            self.giant_size.to_string(),
            self.giant_fraction.to_string(),
            opt(self.baseline_giant_size),
            opt(self.retention()),
            self.distance_samples.len().to_string(),
            self.unreachable_pairs.to_string(),
            opt(self.mean_distance()),
            opt(self.max_distance()),
            opt(self.baseline_mean_distance),
            opt(self.predicted_bound),
            opt(self.predicted_giant_fraction),
            opt(self.predicted_scale),
            opt(self.tier_size),
            opt(self.tier_components),
            opt(self.tier_diameter),
            opt(self.statistic),
            opt(self.statistic_aux),
            distances,
        ]
    }
}

pub fn mean_of(xs: &[u32]) -> Option<f64> {
    if xs.is_empty() {
        None
    } else {
        Some(xs.iter().map(|&x| x as f64).sum::<f64>() / xs.len() as f64)
    }
}

pub fn write_csv<W: Write>(records: &[ExperimentRecord], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(r.csv_fields())?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_row_layout() {
        let mut r = ExperimentRecord::new(ExperimentKind::Robustness, 1000, 2.5, 3, 77);
        r.gamma = Some(0.25);
        r.set_giant(50, 200);
        r.baseline_giant_size = Some(100);
        r.distance_samples = vec![2, 4];
        let mut buf = Vec::new();
        write_csv(&[r], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        assert_eq!(
            lines.next().unwrap(),
            "robustness,1000,2.5,0.25,3,77,200,50,0.25,100,0.5,2,0,3,4,,,,,,,,,,2;4"
        );
    }

    #[test]
    fn giant_fraction_uses_surviving_vertices() {
        let mut r = ExperimentRecord::new(ExperimentKind::Scaling, 10, 2.5, 0, 0);
        r.set_giant(0, 0);
        assert_eq!(r.giant_fraction, 0.0);
        r.set_giant(3, 4);
        assert_eq!(r.giant_fraction, 0.75);
        assert_eq!(r.retention(), None);
        assert_eq!(r.mean_distance(), None);
    }
}
