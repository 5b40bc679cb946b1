//! CSV and SVG writers for catalogs, histograms and comparison reports.

use std::io::Write;

use num_bigint::BigInt;

use crate::analyzer::{
    classify_complexity, function_overview, Catalog, ComplexityClass, DefinableSetsReport, HaltingHistogram,
    RuntimeCensus, Sequence,
};
use crate::compare::{format_tuple, ClassDistribution, MatchSet, SpeedupReport};

pub type ExportResult = Result<(), csv::Error>;

const SAMPLE_NOTE: &str = "# sample-conditioned: derived from a random sample of the richer space";

fn cell(v: &Option<BigInt>) -> String {
    v.as_ref().map_or_else(|| "-1".to_string(), BigInt::to_string)
}

fn tuple(seq: &Sequence) -> String {
    format_tuple(seq)
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

pub fn functions_csv<W: Write>(catalog: &Catalog, out: W) -> ExportResult {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["function", "outputs", "machines", "algorithms", "total"])?;
    for (i, f) in catalog.functions.iter().enumerate() {
        w.write_record([
            i.to_string(),
            tuple(&f.outputs),
            f.members.len().to_string(),
            f.algorithms.len().to_string(),
            f.is_total().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn algorithms_csv<W: Write>(catalog: &Catalog, out: W) -> ExportResult {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["algorithm", "outputs", "runtimes", "spaces", "machines", "first_rule", "class"])?;
    for (i, a) in catalog.algorithms.iter().enumerate() {
        let class = classify_complexity(&a.runtimes).class().map_or("unclassified", ComplexityClass::label);
        w.write_record([
            i.to_string(),
            tuple(&a.outputs),
            tuple(&a.runtimes),
            tuple(&a.spaces),
            a.members.len().to_string(),
            a.members.first().map_or_else(String::new, u64::to_string),
            class.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Every bin from 1 to `max_steps`, zero bins included.
pub fn histogram_csv<W: Write>(h: &HaltingHistogram, out: W) -> ExportResult {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["runtime".to_string(), "count".to_string(), "cumulative_fraction".to_string()];
    header.extend(h.inputs.iter().map(|i| format!("input_{i}")));
    w.write_record(&header)?;
    let cumulative = h.cumulative();
    for t in 1..=h.max_steps {
        let mut row = vec![t.to_string(), h.count(t).to_string(), cumulative[t as usize].to_string()];
        row.extend(h.per_input.iter().map(|bins| bins[t as usize].to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn census_csv<W: Write>(census: &RuntimeCensus, out: W) -> ExportResult {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["rank", "machines", "runtimes"])?;
    for (i, (seq, n)) in census.entries.iter().enumerate() {
        w.write_record([(i + 1).to_string(), n.to_string(), tuple(seq)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn definable_sets_csv<W: Write>(report: &DefinableSetsReport, out: W) -> ExportResult {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["inputs", "witnesses", "first_witness", "complement_definable"])?;
    for s in &report.sets {
        let inputs: Vec<String> = s.inputs.iter().map(u32::to_string).collect();
        w.write_record([
            format!("{{{}}}", inputs.join(",")),
            s.witnesses.len().to_string(),
            s.witnesses.first().map_or_else(String::new, u64::to_string),
            s.complement_definable.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Per-input means for every function.
pub fn overview_csv<W: Write>(catalog: &Catalog, out: W) -> ExportResult {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "function",
        "input",
        "output",
        "convergent_algorithms",
        "mean_runtime",
        "mean_space",
        "harmonic_runtime",
        "harmonic_space",
        "alternating_divergence",
    ])?;
    for (i, f) in catalog.functions.iter().enumerate() {
        let o = function_overview(catalog, f);
        for (s, out) in o.per_input.iter().zip(&o.outputs) {
            w.write_record([
                i.to_string(),
                s.input.to_string(),
                cell(out),
                s.convergent_algorithms.to_string(),
                opt(s.mean_runtime),
                opt(s.mean_space),
                opt(s.harmonic_runtime),
                opt(s.harmonic_space),
                o.alternating_divergence.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Class counts per matched function in both spaces.
pub fn function_classes_csv<W: Write>(set: &MatchSet, mut out: W) -> ExportResult {
    if set.sample_conditioned {
        writeln!(out, "{SAMPLE_NOTE}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["outputs".to_string()];
    for side in ["baseline", "richer"] {
        header.extend(ComplexityClass::ALL.iter().map(|c| format!("{side} {}", c.label())));
        header.push(format!("{side} unclassified"));
    }
    w.write_record(&header)?;
    for m in &set.matches {
        let mut row = vec![tuple(&m.outputs)];
        for algs in [&m.baseline, &m.richer] {
            let mut d = ClassDistribution::default();
            algs.iter().for_each(|a| d.add(a.class));
            row.push(d.constant.to_string());
            row.extend(d.non_constant.iter().map(u64::to_string));
            row.push(d.unclassified.to_string());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Fraction table: one row per space, one column per non-constant class.
pub fn class_fractions_csv<W: Write>(rows: &[(&str, &ClassDistribution)], out: W) -> ExportResult {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["space".to_string()];
    header.extend(ComplexityClass::NON_CONSTANT.iter().map(|c| c.label().to_string()));
    header.extend(["non_constant", "constant", "unclassified"].map(String::from));
    w.write_record(&header)?;
    for (label, d) in rows {
        let mut row = vec![label.to_string()];
        row.extend(d.fractions().iter().map(f64::to_string));
        row.extend([d.non_constant_total(), d.constant, d.unclassified].map(|x| x.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn speedup_csv<W: Write>(r: &SpeedupReport, mut out: W) -> ExportResult {
    if r.sample_conditioned {
        writeln!(out, "{SAMPLE_NOTE}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "outputs",
        "baseline_best_mean",
        "baseline_best_worst",
        "richer_best_mean",
        "faster",
        "slower",
        "ties",
        "speedup",
        "slowdown",
    ])?;
    for f in &r.functions {
        w.write_record([
            tuple(&f.outputs),
            f.baseline_best_mean.to_string(),
            f.baseline_best_worst.to_string(),
            f.richer_best_mean.to_string(),
            f.faster.to_string(),
            f.slower.to_string(),
            f.ties.to_string(),
            opt(f.speedup),
            opt(f.slowdown),
        ])?;
    }
    w.flush()?;
    Ok(())
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 40.0;

fn polyline(points: &[(f64, f64)], title: &str, x_label: &str, y_label: &str) -> String {
    let (xmax, ymax) = points
        .iter()
        .fold((1.0f64, 1.0f64), |(a, b), (x, y)| (a.max(*x), b.max(*y)));
    let sx = |x: f64| MARGIN + x / xmax * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - y / ymax * (HEIGHT - 2.0 * MARGIN);
    let pts: Vec<String> = points.iter().map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y))).collect();
    format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">
<title>{title}</title>
<line x1="{MARGIN}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/>
<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{b}" stroke="black"/>
<text x="{cx}" y="{ly}" text-anchor="middle" font-size="12">{x_label} (max {xmax})</text>
<text x="12" y="{cy}" font-size="12" transform="rotate(-90 12 {cy})" text-anchor="middle">{y_label} (max {ymax})</text>
<polyline fill="none" stroke="steelblue" points="{}"/>
</svg>
"#,
        pts.join(" "),
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN,
        cx = WIDTH / 2.0,
        ly = HEIGHT - 8.0,
        cy = HEIGHT / 2.0,
    )
}

/// Occurrence count against runtime, every bin drawn.
pub fn histogram_svg(h: &HaltingHistogram) -> String {
    let points: Vec<(f64, f64)> = (1..=h.max_steps).map(|t| (t as f64, h.count(t) as f64)).collect();
    polyline(&points, "halting runtimes", "runtime", "occurrences")
}

/// Machine count against census rank.
pub fn census_svg(census: &RuntimeCensus) -> String {
    let points: Vec<(f64, f64)> = census
        .entries
        .iter()
        .enumerate()
        .map(|(i, (_, n))| ((i + 1) as f64, *n as f64))
        .collect();
    polyline(&points, "runtime sequence census", "rank", "machines")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_csv_has_every_bin() {
        let h = HaltingHistogram::new((0..=2).collect(), 10);
        let mut buf = Vec::new();
        histogram_csv(&h, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 11);
        assert!(text.starts_with("runtime,count,cumulative_fraction,input_0,input_1,input_2"));
    }

    #[test]
    fn svg_is_well_formed() {
        let census = RuntimeCensus {
            entries: vec![(vec![Some(BigInt::from(1))], 5), (vec![None], 2)],
        };
        let svg = census_svg(&census);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("<polyline"));
    }

    #[test]
    fn sample_note_on_conditioned_exports() {
        let set = MatchSet { matches: Vec::new(), sample_conditioned: true };
        let mut buf = Vec::new();
        function_classes_csv(&set, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with(SAMPLE_NOTE));
    }
}
