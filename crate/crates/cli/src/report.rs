//! Run reports: a key/value text block per run and a fixed CSV schema.

use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;

/// Bumped whenever the CSV columns change.
pub const CSV_SCHEMA_VERSION: u32 = 1;

/// Column holding the only non-deterministic value.
pub const WALL_TIME_FIELD: &str = "wall_time_ms";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub algorithm: String,
    pub k: usize,
    pub epsilon: f64,
    /// The guess handed to the algorithm, when it came from the oracle.
    pub z: Option<f64>,
    /// `pow2`, `fine`, `oracle-z`, or `none`.
    pub ladder: String,
    pub seed: u64,
    /// Chosen set or node IDs, space separated, in pick order.
    pub chosen: String,
    pub exact_coverage: u64,
    pub estimated_coverage: Option<f64>,
    pub opt: Option<u64>,
    pub ratio: Option<f64>,
    pub element_slots: usize,
    pub set_id_slots: usize,
    pub sketch_registers: usize,
    pub passes: usize,
    pub wall_time_ms: f64,
}

impl RunReport {
    pub fn ratio_of(exact: u64, opt: Option<u64>) -> Option<f64> {
        opt.map(|opt| if opt == 0 { 1.0 } else { exact as f64 / opt as f64 })
    }

    pub fn render(&self) -> String {
        fn opt<T: ToString>(v: &Option<T>) -> String {
            v.as_ref().map_or_else(|| "-".to_string(), T::to_string)
        }
        let rows: [(&str, String); 17] = [
            ("schema", self.schema.to_string()),
            ("algorithm", self.algorithm.clone()),
            ("k", self.k.to_string()),
            ("epsilon", self.epsilon.to_string()),
            ("z", opt(&self.z)),
            ("ladder", self.ladder.clone()),
            ("seed", self.seed.to_string()),
            ("chosen", self.chosen.clone()),
            ("exact_coverage", self.exact_coverage.to_string()),
            ("estimated_coverage", opt(&self.estimated_coverage)),
            ("opt", opt(&self.opt)),
            ("ratio", opt(&self.ratio)),
            ("element_slots", self.element_slots.to_string()),
            ("set_id_slots", self.set_id_slots.to_string()),
            ("sketch_registers", self.sketch_registers.to_string()),
            ("passes", self.passes.to_string()),
            (WALL_TIME_FIELD, format!("{:.3}", self.wall_time_ms)),
        ];
        let mut out = String::new();
        for (key, value) in &rows {
            writeln!(out, "{key:<20}{value}").unwrap();
        }
        out
    }
}

pub fn write_csv<W: Write>(reports: &[RunReport], out: W) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for report in reports {
        writer.serialize(report)?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunReport {
        RunReport {
            schema: CSV_SCHEMA_VERSION,
            algorithm: "single-pass".into(),
            k: 2,
            epsilon: 0.3,
            z: Some(8.0),
            ladder: "oracle-z".into(),
            seed: 42,
            chosen: "1 2".into(),
            exact_coverage: 8,
            estimated_coverage: None,
            opt: Some(8),
            ratio: Some(1.0),
            element_slots: 8,
            set_id_slots: 2,
            sketch_registers: 0,
            passes: 1,
            wall_time_ms: 0.25,
        }
    }

    #[test]
    fn csv_header_is_stable() {
        let mut buf = Vec::new();
        write_csv(&[sample()], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "schema,algorithm,k,epsilon,z,ladder,seed,chosen,exact_coverage,estimated_coverage,opt,ratio,\
             element_slots,set_id_slots,sketch_registers,passes,wall_time_ms"
        );
        assert_eq!(lines.next().unwrap(), "1,single-pass,2,0.3,8.0,oracle-z,42,1 2,8,,8,1.0,8,2,0,1,0.25");
    }

    #[test]
    fn ratio_handles_empty_optimum() {
        assert_eq!(RunReport::ratio_of(0, Some(0)), Some(1.0));
        assert_eq!(RunReport::ratio_of(3, Some(4)), Some(0.75));
        assert_eq!(RunReport::ratio_of(3, None), None);
    }

    #[test]
    fn text_block_lists_every_field() {
        let text = sample().render();
        assert_eq!(text.lines().count(), 17);
        assert!(text.contains("estimated_coverage  -\n"));
        assert!(text.lines().last().unwrap().starts_with(WALL_TIME_FIELD));
    }
}
