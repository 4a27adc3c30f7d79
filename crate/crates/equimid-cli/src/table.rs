//! Column tables and the CSV/JSON writers.

use std::io::{self, Write};

/// Named columns of equal length.
pub struct Table {
    pub columns: Vec<(String, Vec<f64>)>,
}

impl Table {
    pub fn new(columns: Vec<(String, Vec<f64>)>) -> Self {
        if let Some((_, first)) = columns.first() {
            assert!(columns.iter().all(|(_, v)| v.len() == first.len()));
        }
        Table { columns }
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, |(_, v)| v.len())
    }

    pub fn write_csv(&self, w: &mut dyn Write) -> io::Result<()> {
        let header: Vec<&str> = self.columns.iter().map(|(n, _)| n.as_str()).collect();
        writeln!(w, "{}", header.join(","))?;
        for row in 0..self.rows() {
            let mut line = String::new();
            for (i, (_, values)) in self.columns.iter().enumerate() {
                if i > 0 {
                    line.push(',');
                }
                line.push_str(&fmt_sig(values[row]));
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn write_json(&self, w: &mut dyn Write) -> io::Result<()> {
        let columns: Vec<serde_json::Value> = self
            .columns
            .iter()
            .map(|(name, values)| {
                serde_json::json!({
                    "name": name,
                    "values": values,
                })
            })
            .collect();
        let doc = serde_json::json!({ "columns": columns });
        writeln!(w, "{}", serde_json::to_string_pretty(&doc)?)
    }
}

/// 17 significant digits: enough to round-trip any f64.
pub fn fmt_sig(v: f64) -> String {
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips_doubles() {
        let v = [0.1, 1.0 / 3.0, -2.5e-17, 1.449489742783178];
        for x in v {
            let s = fmt_sig(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
        }
    }

    #[test]
    fn csv_layout() {
        let t = Table::new(vec![
            ("a".into(), vec![1.0, 2.0]),
            ("b".into(), vec![0.5, -0.25]),
        ]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("a,b"));
        assert_eq!(
            lines.next(),
            Some("1.0000000000000000e0,5.0000000000000000e-1")
        );
    }
}
