use std::fmt::Write;
use std::io::IsTerminal;

use flockwatch_core::geo::RegionCode;
use flockwatch_core::knowledge::walkthrough::StepReport;
use flockwatch_core::knowledge::Diagnosis;

/// Whether to emit ANSI colour. Off when `NO_COLOR` is set or stdout is not a terminal.
#[derive(Debug, Clone, Copy)]
pub struct Style {
    color: bool,
}

impl Style {
    pub fn detect() -> Self {
        let no_color = std::env::var_os("NO_COLOR").is_some_and(|v| !v.is_empty());
        Style {
            color: !no_color && std::io::stdout().is_terminal(),
        }
    }

    fn paint(&self, code: &str, text: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }

    fn bold(&self, text: &str) -> String {
        self.paint("1", text)
    }

    fn verdict(&self, ok: bool) -> String {
        if ok {
            self.paint("32", "ok")
        } else {
            self.paint("31", "MISMATCH")
        }
    }
}

pub fn diagnosis(d: &Diagnosis, region: Option<&RegionCode>, style: Style) -> String {
    let mut out = String::new();
    if let Some(code) = region {
        let _ = writeln!(out, "Region: {code}");
    }
    let _ = writeln!(out, "Symptoms: {}", d.symptom_ids.join(", "));
    let _ = writeln!(
        out,
        "Top diagnosis: {} (mass {:.5})",
        style.bold(&d.top_label),
        d.top_mass
    );
    let width = d
        .ranked
        .iter()
        .map(|r| r.display.chars().count())
        .max()
        .unwrap_or(0)
        .max(9);
    let _ = writeln!(out, "\n{:<width$}  {:>7}", "Focal set", "mass");
    for r in &d.ranked {
        let _ = writeln!(out, "{:<width$}  {:>7.5}", r.display, r.mass);
    }
    let _ = writeln!(out, "\n{:<8}  {:>7}  {:>7}  label", "disease", "Bel", "Pl");
    for s in &d.per_disease {
        let _ = writeln!(
            out,
            "{:<8}  {:>7.5}  {:>7.5}  {}",
            s.disease, s.belief, s.plausibility, s.label
        );
    }
    if !d.conflict_trace.is_empty() {
        let trace: Vec<String> = d.conflict_trace.iter().map(|k| format!("{k:.5}")).collect();
        let _ = writeln!(out, "\nConflict per step: {}", trace.join(", "));
    }
    out
}

pub fn walkthrough(steps: &[StepReport], style: Style) -> String {
    let mut out = String::new();
    for step in steps {
        let _ = writeln!(
            out,
            "{}  ({} symptoms: {})",
            style.bold(step.name),
            step.symptoms.len(),
            step.symptoms.join(", ")
        );
        let k_delta = step.computed_conflict - step.published_conflict;
        let _ = writeln!(
            out,
            "  {:<36} {:>9} {:>12} {:>10}",
            "focal set", "published", "computed", "delta"
        );
        let _ = writeln!(
            out,
            "  {:<36} {:>9.5} {:>12.8} {:>+10.1e}",
            "K", step.published_conflict, step.computed_conflict, k_delta
        );
        for row in &step.rows {
            let _ = write!(
                out,
                "  {:<36} {:>9.5} {:>12.8} {:>+10.1e}",
                row.focal, row.published, row.computed, row.delta
            );
            if let Some(note) = row.note {
                let _ = write!(out, "  ({note})");
            }
            out.push('\n');
        }
        if step.unlisted_mass > 0.0 {
            let _ = writeln!(out, "  mass on unlisted focal sets: {:.8}", step.unlisted_mass);
        }
        let _ = writeln!(out, "  {}\n", style.verdict(step.passed()));
    }
    let all = steps.iter().all(|s| s.passed());
    let _ = writeln!(
        out,
        "{}",
        if all {
            "all steps within 5e-5 of the published tables".to_string()
        } else {
            style.paint(
                "31",
                "some steps differ from the published tables by more than 5e-5",
            )
        }
    );
    out
}
