//! Standalone gnuplot scripts that read the emitted CSVs by relative path.

use std::fmt::Write;

fn preamble(png: &str) -> String {
    format!(
        "set datafile separator ','\nset terminal pngcairo size 1200,900\nset output '{png}'\nset grid\nset key outside right autotitle columnhead\n"
    )
}

fn plot_series(out: &mut String, series: &[(String, String)], x: usize, y: usize) {
    let parts: Vec<String> = series
        .iter()
        .map(|(label, csv)| format!("'{csv}' using {x}:{y} with lines title '{label}'"))
        .collect();
    let _ = writeln!(out, "plot {}", parts.join(", \\\n     "));
}

/// `q`, `p` and `s` against `t`, one panel each, all series overlaid.
pub fn trajectories(series: &[(String, String)], dim: usize) -> String {
    let mut s = preamble("trajectories.png");
    s.push_str("set multiplot layout 3,1\nset xlabel 't'\n");
    for (name, col) in [("q1", 2), ("p1", 2 + dim), ("s", 2 + 2 * dim)] {
        let _ = writeln!(s, "set ylabel '{name}'");
        plot_series(&mut s, series, 1, col);
    }
    s.push_str("unset multiplot\n");
    s
}

/// Per-step contact residual on a logarithmic axis.
pub fn contact(series: &[(String, String)]) -> String {
    let mut s = preamble("contact_residuals.png");
    s.push_str("set logscale y\nset format y '%.0e'\nset xlabel 't'\nset ylabel 'contact residual'\n");
    plot_series(&mut s, series, 2, 3);
    s
}

/// Conformal factor against its reference columns.
pub fn conformal(csv: &str, references: &[&str]) -> String {
    let mut s = preamble(&format!("{}.png", csv.trim_end_matches(".csv")));
    s.push_str("set xlabel 't'\nset ylabel 'conformal factor'\n");
    let mut parts = vec![format!("'{csv}' using 2:3 with lines title 'lambda'")];
    for (i, name) in references.iter().enumerate() {
        parts.push(format!("'{csv}' using 2:{} with lines title '{name}'", 4 + i));
    }
    let _ = writeln!(s, "plot {}", parts.join(", \\\n     "));
    s
}

/// Strong error against step size on log–log axes.
pub fn convergence(csv: &str, slope: Option<f64>) -> String {
    let mut s = preamble("convergence.png");
    let title = slope.map_or("slope n/a".to_string(), |k| format!("fitted slope {k:.3}"));
    let _ = writeln!(
        s,
        "set logscale xy\nset xlabel 'h'\nset ylabel 'strong error'\nset title '{title}'\nplot '{csv}' using 2:4 with linespoints title 'error'"
    );
    s
}

/// `|∂s_N/∂q_j|` against `j`.
pub fn criticality(series: &[(String, String)]) -> String {
    let mut s = preamble("criticality.png");
    s.push_str("set logscale y\nset format y '%.0e'\nset xlabel 'j'\nset ylabel '|ds_N/dq_j|'\n");
    plot_series(&mut s, series, 1, 2);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scripts_reference_their_csvs() {
        let series = vec![("contact".to_string(), "trajectory_contact.csv".to_string())];
        let s = trajectories(&series, 1);
        assert!(s.contains("'trajectory_contact.csv' using 1:4"));
        assert!(convergence("convergence.csv", Some(1.0)).contains("fitted slope 1.000"));
    }
}
