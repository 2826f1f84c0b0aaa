use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::Context as _;
use kspenta::bases::{
    enumerate_orthogonal_octads, occurrence_counts, paper_relations_rank1, verify_completeness, FOURFOLD_RAYS,
};
use kspenta::hypergraph::{build_hypergraph, export, relabel_planes, ExportFormat};
use kspenta::parity::{check_parity_proof, max_satisfiable_contexts, search_assignment};
use kspenta::pentagram::{count_sign_assignments, verify_pentagram};
use kspenta::rank2::{enumerate_rank2_proofs, paper_rank2_proof, verify_rank2_proof};
use kspenta::rays::{derive_octads, RowStatus, TABLE_ONE};
use kspenta::{build_pentagram, IncidenceSystem, PaperSystem, Ray};
use serde_json::json;

use crate::report::{render_checks, InputDigest, Outcome, ReportBuilder};

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or unreadable input; exit 2.
    Usage(String),
    Internal(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Internal(e)
    }
}

impl From<kspenta::Error> for CliError {
    fn from(e: kspenta::Error) -> Self {
        CliError::Internal(e.into())
    }
}

type CmdResult = Result<Outcome, CliError>;

fn fmt_ray(r: &Ray) -> String {
    r.components().iter().map(|c| format!("{c:>2}")).collect::<Vec<_>>().join(" ")
}

fn fmt_sign(s: i8) -> &'static str {
    if s > 0 {
        "+"
    } else {
        "-"
    }
}

fn outcome(report: ReportBuilder, outputs: serde_json::Value, text: String) -> Outcome {
    Outcome { report: report.finish(outputs), text, raw: false }
}

fn pentagram_digest() -> InputDigest {
    let p = build_pentagram();
    let names: Vec<String> = p.observables.iter().map(|o| o.to_string()).collect();
    let mut d = InputDigest::default();
    d.add_json("observables", &names).add_json("contexts", &p.contexts).add_json("horizontal", &p.horizontal_context);
    d
}

fn paper_digest() -> InputDigest {
    let mut d = pentagram_digest();
    d.add_json("table", &TABLE_ONE[..]).add_json("relations", &paper_relations_rank1());
    d
}

pub fn pentagram() -> CmdResult {
    let p = build_pentagram();
    let report = verify_pentagram(&p);
    let count = count_sign_assignments(&p)?;

    let mut r = ReportBuilder::new("pentagram", pentagram_digest());
    r.check("structure", report.passed(), if report.passed() { "ok".into() } else { report.failures.join("; ") });
    r.check("commuting_contexts", report.contexts.iter().all(|c| c.mutually_commuting), "every line pairwise commutes");
    let signs: Vec<String> =
        report.product_signs().iter().map(|s| s.map_or("?".into(), |s| format!("{}I", fmt_sign(s)))).collect();
    r.check("line_products", report.product_signs() == [Some(1), Some(1), Some(1), Some(1), Some(-1)], signs.join(" "));
    r.check("membership", report.membership.iter().all(|&m| m == 2), "each observable on two lines");
    r.check("sign_assignments", count == 0, format!("{count} of 1024 assignments satisfy all line products"));
    r.headline("count", count);

    let mut t = String::from("observables\n  id  operator\n");
    for (i, o) in p.observables.iter().enumerate() {
        let _ = writeln!(t, "  {:>2}  {o}", i + 1);
    }
    t.push_str("\ncontexts\n  line  members          product  commuting\n");
    for c in &report.contexts {
        let members: Vec<String> = p.context_observables(c.context).iter().map(|o| o.to_string()).collect();
        let horizontal = if c.context == p.horizontal_context { "  (horizontal)" } else { "" };
        let _ = writeln!(
            t,
            "  {:>4}  {}  {:>7}  {}{horizontal}",
            c.context + 1,
            members.join(" "),
            c.product_sign.map_or("?".into(), |s| format!("{}I", fmt_sign(s))),
            if c.mutually_commuting { "yes" } else { "no" }
        );
    }
    let _ = writeln!(t, "\nsign assignments satisfying every line product: {count} of 1024");

    let outputs = json!({
        "observables": p.observables.iter().map(|o| o.to_string()).collect::<Vec<_>>(),
        "contexts": report.contexts.iter().map(|c| json!({
            "line": c.context + 1,
            "members": p.contexts[c.context].iter().map(|i| i + 1).collect::<Vec<_>>(),
            "product_sign": c.product_sign,
            "mutually_commuting": c.mutually_commuting,
        })).collect::<Vec<_>>(),
        "horizontal_line": p.horizontal_context + 1,
        "membership": report.membership,
        "sign_assignments": count,
    });
    Ok(outcome(r, outputs, t))
}

pub fn rays(table_check: bool) -> CmdResult {
    let octads = derive_octads(&build_pentagram())?;
    let distinct: BTreeSet<Ray> = octads.iter().flat_map(|o| o.ray_set()).collect();
    let mut digest = pentagram_digest();
    if table_check {
        digest.add_json("table", &TABLE_ONE[..]).add_json("relations", &paper_relations_rank1());
    }
    let mut r = ReportBuilder::new("rays", digest);
    r.check("distinct_rays", distinct.len() == 40, format!("{} distinct rays in {} octads", distinct.len(), octads.len()));
    let complete = octads.iter().filter(|o| o.is_orthogonal_basis()).count();
    r.check("octads_complete", complete == octads.len(), format!("{complete} octads are orthonormal bases summing to I"));

    let p = build_pentagram();
    let mut t = String::new();
    for o in &octads {
        let names: Vec<String> = p.context_observables(o.context).iter().map(|x| x.to_string()).collect();
        let _ = writeln!(t, "octad for line {} ({})\n  signs     ray", o.context + 1, names.join(" "));
        for e in &o.rays {
            let signs: String = e.signs.iter().map(|&s| fmt_sign(s)).collect();
            let _ = writeln!(t, "  {signs:<8}  {}", fmt_ray(&e.ray));
        }
        t.push('\n');
    }
    let mut outputs = json!({ "octads": octads.iter().map(|o| json!({
        "line": o.context + 1,
        "rays": o.rays,
    })).collect::<Vec<_>>() });

    if table_check {
        let sys = PaperSystem::build()?;
        let recon = &sys.reconciliation;
        let flagged = recon.flagged();
        r.check("table_rows_matched", true, format!("{} of {} printed rows match a derived ray", recon.matched().len(), recon.rows.len()));
        let resolved: Vec<usize> = sys.id_assignment.overrides.iter().map(|o| o.id).collect();
        r.check("flagged_rows_resolved", resolved == flagged, format!("flagged {flagged:?}, each given a unique derived ray"));
        let all_derived = sys.rays.iter().all(|(_, ray)| distinct.contains(ray));
        r.check("ray_store", all_derived && sys.rays.len() == 40, "ids 1..40 carry derived rays");

        t.push_str("table check\n  id  status       printed               ray\n");
        for row in &recon.rows {
            let status = match &row.status {
                RowStatus::Matched => "matched".to_string(),
                RowStatus::Flagged(d) => serde_json::to_value(d).ok().and_then(|v| v["defect"].as_str().map(String::from)).unwrap_or_default(),
            };
            let ray = sys.rays.get(row.id)?;
            // the table's overbars are combining marks and take no column
            let width = row.printed.chars().filter(|&c| c != '\u{304}').count();
            let pad = " ".repeat(20usize.saturating_sub(width));
            let _ = writeln!(t, "  {:>2}  {status:<11}  {}{pad}  {}", row.id, row.printed, fmt_ray(ray));
        }
        outputs["table"] = json!({
            "block_lines": recon.block_contexts.iter().map(|c| c + 1).collect::<Vec<_>>(),
            "rows": recon.rows,
            "overrides": sys.id_assignment.overrides,
            "candidates": sys.id_assignment.candidates,
        });
        outputs["rays"] = json!(sys.rays.records());
    }
    Ok(outcome(r, outputs, t))
}

pub fn relations(enumerate_octads: bool) -> CmdResult {
    let sys = PaperSystem::build()?;
    let mut r = ReportBuilder::new("relations", paper_digest());
    let mut t = String::from("relations\n   #  rays                                complete\n");
    let mut rows = Vec::new();
    let mut all_complete = true;
    for (i, rel) in sys.relations.relations.iter().enumerate() {
        let c = verify_completeness(rel, &sys.rays)?;
        all_complete &= c.complete;
        let ids: Vec<String> = rel.iter().map(|id| format!("{id:>2}")).collect();
        let _ = writeln!(t, "  {:>2}  {}  {}", i + 1, ids.join(" "), if c.complete { "yes" } else { "no" });
        rows.push(json!({ "id": i + 1, "rays": rel, "complete": c.complete }));
    }
    r.check("completeness", all_complete, "every relation sums to I");

    let counts = occurrence_counts(&sys.relations);
    let fours: Vec<usize> = counts.iter().filter(|(_, &c)| c == 4).map(|(&id, _)| id).collect();
    let twos: Vec<usize> = counts.iter().filter(|(_, &c)| c == 2).map(|(&id, _)| id).collect();
    r.check(
        "occurrences",
        counts.len() == 40 && fours.len() == 20 && twos.len() == 20,
        format!("{} rays four times, {} rays twice", fours.len(), twos.len()),
    );
    r.check("fourfold_set", fours == FOURFOLD_RAYS, "rays occurring four times match the listed set");
    let _ = writeln!(t, "\noccurs 4 times: {fours:?}\noccurs 2 times: {twos:?}");

    let mut outputs = json!({ "relations": rows, "occurrences": counts, "fourfold": fours, "twofold": twos });
    if enumerate_octads {
        let rays: Vec<(usize, Ray)> = sys.rays.iter().map(|(id, r)| (id, *r)).collect();
        let octads = enumerate_orthogonal_octads(&rays);
        let found: BTreeSet<Vec<usize>> = octads.iter().cloned().collect();
        let covered = sys.relations.relations.iter().all(|rel| {
            let mut s = rel.clone();
            s.sort_unstable();
            found.contains(&s)
        });
        r.check("octads_cover_relations", covered, format!("{} orthogonal octads, all relations among them", octads.len()));
        r.headline("count", octads.len());
        let _ = writeln!(t, "\northogonal octads: {}", octads.len());
        for o in &octads {
            let ids: Vec<String> = o.iter().map(|id| format!("{id:>2}")).collect();
            let _ = writeln!(t, "  {}", ids.join(" "));
        }
        outputs["octads"] = json!(octads);
    }
    Ok(outcome(r, outputs, t))
}

pub enum SystemArg {
    Rank1,
    Rank2,
    File(PathBuf),
}

impl SystemArg {
    pub fn parse(s: &str) -> SystemArg {
        match s {
            "rank1" => SystemArg::Rank1,
            "rank2" => SystemArg::Rank2,
            path => SystemArg::File(PathBuf::from(path)),
        }
    }
}

fn load_system(path: &Path) -> Result<(IncidenceSystem, Vec<u8>), CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|_| CliError::Usage(format!("{} is not UTF-8 text", path.display())))?;
    let sys = IncidenceSystem::from_json_str(text)
        .map_err(|e| CliError::Usage(format!("{}: invalid incidence system: {e}", path.display())))?;
    Ok((sys, bytes))
}

pub fn search(system: SystemArg, max: bool) -> CmdResult {
    let (label, sys, digest, expect_unsat) = match &system {
        SystemArg::Rank1 => {
            let mut d = paper_digest();
            d.add("system", b"rank1");
            (String::from("rank1"), IncidenceSystem::from_relations(&paper_relations_rank1())?, d, true)
        }
        SystemArg::Rank2 => {
            let mut d = paper_digest();
            d.add("system", b"rank2").add_json("pairings", &paper_rank2_proof());
            (String::from("rank2"), paper_rank2_proof().incidence_system()?, d, true)
        }
        SystemArg::File(path) => {
            let (sys, bytes) = load_system(path)?;
            let mut d = InputDigest::default();
            d.add("system_file", &bytes);
            (path.display().to_string(), sys, d, false)
        }
    };
    let cert = check_parity_proof(&sys);
    let out = search_assignment(&sys);
    let verdict = if out.is_sat() { "SAT" } else { "UNSAT" };

    let mut r = ReportBuilder::new("search", digest);
    if expect_unsat {
        r.check("unsat", !out.is_sat(), format!("exhaustive search: {verdict}"));
    }
    r.check(
        "certificate_consistent",
        !(cert.valid && out.is_sat()),
        if cert.valid { "parity certificate valid" } else { "no parity certificate" },
    );
    if let Some(w) = out.witness() {
        r.check("witness_valid", w.is_satisfying(&sys), "witness puts exactly one 1 in every context");
    }
    r.headline("result", verdict);

    let mut t = String::new();
    let _ = writeln!(t, "system      {label}");
    let _ = writeln!(t, "outcomes    {}", sys.outcomes().len());
    let _ = writeln!(t, "contexts    {}", sys.contexts().len());
    let _ = writeln!(
        t,
        "parity      {}",
        if cert.valid {
            "valid (every outcome even, odd number of contexts)".to_string()
        } else {
            format!("not a parity proof (odd outcomes {:?}, {} contexts)", cert.odd_outcomes, cert.context_count)
        }
    );
    let _ = writeln!(t, "search      {verdict} after {} nodes", out.nodes());
    if let Some(w) = out.witness() {
        let _ = writeln!(t, "witness     ones at {:?}", w.ones());
    }

    let mut outputs = json!({
        "system": label,
        "outcomes": sys.outcomes().len(),
        "contexts": sys.contexts().len(),
        "rank": sys.rank(),
        "dimension": sys.dimension(),
        "certificate": {
            "valid": cert.valid,
            "odd_outcomes": cert.odd_outcomes,
            "context_count": cert.context_count,
        },
        "search": out,
    });
    if max {
        let m = max_satisfiable_contexts(&sys);
        r.check("max_witness", m.witness.satisfied_contexts(&sys) == m.value, format!("{} of {} contexts", m.value, sys.contexts().len()));
        let _ = writeln!(t, "max         {} of {} contexts satisfiable, violated {:?}", m.value, sys.contexts().len(), m.violated.iter().map(|c| c + 1).collect::<Vec<_>>());
        outputs["max_satisfiable"] = json!({
            "value": m.value,
            "witness_ones": m.witness.ones(),
            "violated": m.violated.iter().map(|c| c + 1).collect::<Vec<_>>(),
        });
    }
    Ok(outcome(r, outputs, t))
}

pub fn pairings(enumerate: bool, paper: bool) -> CmdResult {
    let sys = PaperSystem::build()?;
    let mut digest = paper_digest();
    digest.add_json("pairings", &sys.proof).add_json("mode", &[enumerate, paper]);
    let mut r = ReportBuilder::new("pairings", digest);
    let mut t = String::new();
    let mut outputs = json!({});

    if paper {
        let rep = verify_rank2_proof(&sys.proof, &sys.relations, &sys.rays)?;
        r.check("matchings", rep.relations.iter().all(|c| c.perfect_matching && c.planes_valid), "each line pairs its relation's rays into orthogonal planes");
        r.check("plane_sums", rep.relations.iter().all(|c| c.sums_to_identity), "every line's four planes sum to I");
        r.check("even_multiplicities", rep.all_even, format!("{} distinct planes", rep.distinct_planes));
        r.check("thirty_planes_twice", rep.distinct_planes == 30 && rep.planes.iter().all(|p| p.multiplicity == 2), "30 planes, each used twice");
        r.check("certificate", rep.parity.valid, format!("{} contexts", rep.parity.context_count));
        r.check("unsat", !rep.search.is_sat(), format!("exhaustive search UNSAT after {} nodes", rep.search.nodes()));

        t.push_str("published pairing\n   #  planes\n");
        for (i, m) in sys.proof.matchings.iter().enumerate() {
            let planes: Vec<String> = m.iter().map(|(a, b)| format!("P({a},{b})")).collect();
            let _ = writeln!(t, "  {:>2}  {}", i + 1, planes.join(" + "));
        }
        let _ = writeln!(t, "\ndistinct planes {}, multiplicities all 2: {}", rep.distinct_planes, rep.planes.iter().all(|p| p.multiplicity == 2));
        outputs["paper"] = json!({ "proof": sys.proof.export(), "report": rep });
    }

    if enumerate {
        let e = enumerate_rank2_proofs(&sys.relations);
        r.check("count", e.count() == 243, format!("{} proofs", e.count()));
        r.check("contains_published", e.contains(&sys.proof), "the published pairing is among them");
        r.headline("count", e.count());
        if !t.is_empty() {
            t.push('\n');
        }
        let _ = writeln!(t, "rank-2 parity proofs: {}", e.count());
        let _ = writeln!(t, "search nodes: {}", e.nodes);
        t.push_str("distinct planes per proof\n");
        for (k, v) in &e.plane_count_distribution {
            let _ = writeln!(t, "  {k:>3} planes: {v} proofs");
        }
        t.push_str("largest plane multiplicity\n");
        for (k, v) in &e.max_multiplicity_distribution {
            let _ = writeln!(t, "  {k:>3}: {v} proofs");
        }
        outputs["enumeration"] = json!({
            "count": e.count(),
            "plane_count_distribution": e.plane_count_distribution,
            "max_multiplicity_distribution": e.max_multiplicity_distribution,
            "nodes": e.nodes,
            "proofs": e.proofs.iter().map(|p| &p.matchings).collect::<Vec<_>>(),
        });
    }
    Ok(outcome(r, outputs, t))
}

pub fn hypergraph(format: &str, out: Option<&Path>, json_mode: bool) -> CmdResult {
    let fmt: ExportFormat = format.parse().map_err(|e: kspenta::Error| CliError::Usage(e.to_string()))?;
    let sys = PaperSystem::build()?;
    let labels = relabel_planes(&sys.proof)?;
    let hg = build_hypergraph(&sys.proof, &labels, &sys.rays)?;
    let document = export(&hg, fmt);

    let mut digest = paper_digest();
    digest.add_json("pairings", &sys.proof).add("format", format.as_bytes());
    let mut r = ReportBuilder::new("hypergraph", digest);
    r.check("vertices", hg.vertices.len() == 30, format!("{} vertices", hg.vertices.len()));
    r.check("hyperedges", hg.hyperedges.len() == 15, format!("{} hyperedges", hg.hyperedges.len()));
    r.check("degree", hg.vertices.iter().all(|v| hg.hyperedge_degree(v.label) == 2), "every vertex in two hyperedges");
    let named = [[15, 19, 26, 30], [11, 16, 25, 26], [12, 18, 25, 30]];
    r.check("named_hyperedges", named.iter().all(|h| hg.contains_hyperedge(h)), "{15,19,26,30} {11,16,25,26} {12,18,25,30}");
    r.check("hyperedge_cliques", hg.hyperedges.iter().all(|h| h.iter().all(|&a| h.iter().all(|&b| a == b || hg.has_edge(a, b)))), "every hyperedge is a 4-clique");

    let extra = hg.extra_edges();
    let mut outputs = json!({
        "format": format,
        "vertices": hg.vertices.len(),
        "edges": hg.edges.len(),
        "extra_edges": extra,
        "hyperedges": hg.hyperedges.len(),
    });
    let mut text = String::new();
    let mut raw = false;
    if let Some(path) = out {
        std::fs::write(path, &document).with_context(|| format!("cannot write {}", path.display()))?;
        outputs["out"] = json!(path.display().to_string());
        let _ = writeln!(text, "wrote {} ({format})", path.display());
        let _ = writeln!(
            text,
            "{} vertices, {} orthogonality edges ({} outside hyperedges), {} hyperedges",
            hg.vertices.len(),
            hg.edges.len(),
            extra.len(),
            hg.hyperedges.len()
        );
    } else if json_mode {
        outputs["document"] = match fmt {
            ExportFormat::Json => serde_json::to_value(&hg).map_err(anyhow::Error::from)?,
            ExportFormat::Dot => json!(document),
        };
    } else {
        text = document;
        raw = true;
    }
    let mut o = outcome(r, outputs, text);
    o.raw = raw;
    Ok(o)
}

pub fn render(o: &Outcome) -> String {
    if o.raw {
        return o.text.clone();
    }
    let mut s = o.text.clone();
    s.push_str(&render_checks(&o.report));
    s
}
