use std::fmt::Write as _;

/// 17 significant digits in scientific notation.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// One CSV table plus the verdict printed on standard output.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Tolerances, quadrature orders and derived scalars for the metadata block.
    pub notes: Vec<(String, String)>,
    pub verdict: String,
    pub pass: bool,
}

impl Report {
    pub fn new(command: &'static str, header: &[&str]) -> Self {
        Self {
            command,
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
            verdict: String::new(),
            pass: true,
        }
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.notes.push((key.to_string(), value.to_string()));
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.command)
    }

    pub fn verdict_line(&self) -> String {
        format!("{} {}: {}", if self.pass { "PASS" } else { "FAIL" }, self.command, self.verdict)
    }

    /// Metadata comment block, header row, then the rows.
    pub fn to_csv(&self, config_echo: &str, seed: u64) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# nonlocal {} {}", self.command, env!("CARGO_PKG_VERSION"));
        let _ = writeln!(out, "# seed = {seed}");
        for (k, v) in &self.notes {
            let _ = writeln!(out, "# {k} = {v}");
        }
        let _ = writeln!(out, "# verdict = {}", self.verdict_line());
        for line in config_echo.lines() {
            let _ = writeln!(out, "# config | {line}");
        }
        let _ = writeln!(out, "{}", self.header.join(","));
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn layout() {
        let mut r = Report::new("demo", &["a", "b"]);
        r.rows.push(vec![num(1.0), num(2.0)]);
        r.note("tolerance.x", 1e-8);
        r.verdict = "ok".into();
        let csv = r.to_csv("[sweep]\np = 2.0", 7);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# nonlocal demo 0.1.0");
        assert!(lines.contains(&"# tolerance.x = 0.00000001"));
        assert!(lines.contains(&"# config | [sweep]"));
        assert_eq!(lines[lines.len() - 2], "a,b");
        assert_eq!(r.verdict_line(), "PASS demo: ok");
    }
}
