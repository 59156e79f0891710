use std::fmt;

use serde::Serialize;

/// Where a target value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Provenance {
    /// Stated in the source text.
    Quoted,
    /// Computed independently from stated quantities.
    Derived,
    /// A modelling choice constrained by qualitative statements.
    Reconstructed,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Quoted => "quoted",
            Provenance::Derived => "derived",
            Provenance::Reconstructed => "reconstructed",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Entry {
    pub name: String,
    pub computed: f64,
    pub target: Option<(f64, Provenance)>,
    pub tolerance: f64,
    pub pass: bool,
}

/// Computed quantities of a scenario next to their targets.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReproductionReport {
    pub scenario: String,
    pub entries: Vec<Entry>,
    pub notes: Vec<String>,
    /// True when every entry with a target is within its tolerance.
    pub pass: bool,
}

impl ReproductionReport {
    pub fn new(scenario: &str) -> ReproductionReport {
        ReproductionReport { scenario: scenario.into(), entries: Vec::new(), notes: Vec::new(), pass: true }
    }

    /// Adds a value compared against `target` within `tolerance`.
    pub fn compare(&mut self, name: &str, computed: f64, target: f64, tolerance: f64, prov: Provenance) {
        let pass = (computed - target).abs() <= tolerance;
        self.push(Entry { name: name.into(), computed, target: Some((target, prov)), tolerance, pass });
    }

    /// Adds a yes/no outcome that must be true.
    pub fn check(&mut self, name: &str, ok: bool, prov: Provenance) {
        self.compare(name, if ok { 1.0 } else { 0.0 }, 1.0, 0.0, prov);
    }

    /// Adds a value with no target.
    pub fn record(&mut self, name: &str, computed: f64) {
        self.push(Entry { name: name.into(), computed, target: None, tolerance: 0.0, pass: true });
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    fn push(&mut self, e: Entry) {
        self.pass &= e.pass;
        self.entries.push(e);
    }

    pub fn get(&self, name: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// Value of an entry; panics when absent.
    pub fn value(&self, name: &str) -> f64 {
        self.get(name).unwrap_or_else(|| panic!("no entry `{name}`")).computed
    }

    /// Merges another report's entries under a name prefix.
    pub fn absorb(&mut self, prefix: &str, other: ReproductionReport) {
        for mut e in other.entries {
            e.name = format!("{prefix}{}", e.name);
            self.push(e);
        }
        self.notes.extend(other.notes);
    }
}

fn num(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{x}")
    } else if x.abs() < 1e-3 {
        format!("{x:.3e}")
    } else {
        format!("{x:.6}")
    }
}

impl fmt::Display for ReproductionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario {}: {}", self.scenario, if self.pass { "pass" } else { "FAIL" })?;
        let width = self.entries.iter().map(|e| e.name.len()).max().unwrap_or(4).max(4);
        writeln!(f, "  {:<width$}  {:>12}  {:>12}  {:>9}  {:<13}  ok", "name", "computed", "target", "tol", "source")?;
        for e in &self.entries {
            let (t, p) = match e.target {
                Some((t, p)) => (num(t), p.to_string()),
                None => ("-".into(), "-".into()),
            };
            let tol = if e.target.is_some() { format!("{:.1e}", e.tolerance) } else { "-".into() };
            writeln!(
                f,
                "  {:<width$}  {:>12}  {:>12}  {:>9}  {:<13}  {}",
                e.name,
                num(e.computed),
                t,
                tol,
                p,
                if e.pass { "yes" } else { "NO" }
            )?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_tracks_entries() {
        let mut r = ReproductionReport::new("t");
        r.record("info", 3.0);
        r.compare("close", 0.451, 0.45, 0.01, Provenance::Quoted);
        assert!(r.pass);
        r.check("flag", false, Provenance::Derived);
        assert!(!r.pass);
        let text = r.to_string();
        assert!(text.contains("FAIL"));
        assert!(text.contains("close"));
    }
}
