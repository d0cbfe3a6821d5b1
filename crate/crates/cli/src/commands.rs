use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use robustflow::instances::{Commodity, Digraph, MrfInstance, MrfMInstance, MrfRInstance, PathFlow};
use robustflow::io::{
    generate, parse_flow, parse_instance, serialize_flow, serialize_instance, serialize_provenance, GeneratorSpec,
    Instance,
};
use robustflow::lp::LinearProgram;
use robustflow::oracles::{clique_interdiction_bruteforce, fractional_chromatic_number, UndirectedGraph};
use robustflow::reductions::{
    check_properties, expand_immune, mrfr_to_mrf, normalize_mrfr, reduce_clique_interdiction, reduce_coloring_to_mrfr,
    reduce_mrfm_to_mrf, reduce_mrfr_to_mrfm, Provenance,
};
use robustflow::solvers::{
    check_mrf_m_witness, check_mrf_r_witness, check_mrf_witness, decide_integral_mrf_r_star, decide_mrf_m_star_run,
    decide_mrf_r_star_run, decide_mrf_star_run, solve_mrf, solve_rni, Decision, DecisionRun,
};
use robustflow::{Error, Limits, Rational, Result};

use crate::{Cli, Command, OracleKind, Stage, Target};

pub fn run(cli: &Cli, limits: &Limits) -> Result<String> {
    let ctx = Context {
        dump_lp: cli.dump_lp,
        limits,
    };
    match &cli.command {
        Command::Solve { file, witness } => ctx.solve(&read_instance(file)?, witness.as_deref()),
        Command::Decide {
            file,
            threshold,
            witness,
            check_witness,
        } => {
            let inst = read_instance(file)?;
            let threshold = threshold.as_deref().map(parse_threshold).transpose()?;
            match check_witness {
                Some(flow) => ctx.check(&inst, threshold, &read_text(flow)?),
                None => ctx.decide(&inst, threshold, witness.as_deref()),
            }
        }
        Command::Reduce { file, to, out } => reduce(&read_instance(file)?, *to, out),
        Command::Verify { file, until } => ctx.verify(&read_instance(file)?, *until),
        Command::Oracle { which, file } => oracle(*which, &read_instance(file)?, limits),
        Command::Gen { spec, out } => gen(spec, out.as_deref()),
    }
}

struct Context<'a> {
    dump_lp: bool,
    limits: &'a Limits,
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn read_instance(path: &Path) -> Result<Instance> {
    parse_instance(&read_text(path)?, false)
}

fn parse_threshold(text: &str) -> Result<Rational> {
    Rational::parse(text, false).map_err(|e| Error::parse("--threshold", e.to_string()))
}

fn answer(yes: bool) -> &'static str {
    if yes {
        "YES"
    } else {
        "NO"
    }
}

fn flow_instance_expected(inst: &Instance) -> Error {
    Error::precondition(format!(
        "expected an mrf, mrf_r or mrf_m instance, got {:?}; graph instances go through `oracle` or `reduce`",
        inst.variant()
    ))
}

/// Appends the witness document, or writes it to `dest`.
fn emit_witness(
    out: &mut String,
    flow: &PathFlow,
    graph: &Digraph,
    commodities: &[Commodity],
    dest: Option<&Path>,
) -> Result<()> {
    let text = serialize_flow(flow, graph, commodities);
    match dest {
        Some(path) => {
            write_text(path, &text)?;
            let _ = writeln!(out, "witness {}", path.display());
        }
        None => out.push_str(&text),
    }
    Ok(())
}

impl Context<'_> {
    fn dump(&self, label: &str, lp: &LinearProgram) {
        if self.dump_lp {
            eprintln!("# {label}");
            eprint!("{}", lp.dump());
        }
    }

    fn run_mrf(&self, inst: &MrfInstance, threshold: &Rational, label: &str) -> Result<Decision> {
        let run = decide_mrf_star_run(inst, threshold, self.limits)?;
        Ok(self.finish(run, label))
    }

    fn run_mrf_r(&self, inst: &MrfRInstance, label: &str) -> Result<Decision> {
        if inst.integral {
            if self.dump_lp {
                eprintln!("# {label}: integral instance, decided by enumeration");
            }
            return decide_integral_mrf_r_star(inst, self.limits);
        }
        let run = decide_mrf_r_star_run(inst, self.limits)?;
        Ok(self.finish(run, label))
    }

    fn run_mrf_m(&self, inst: &MrfMInstance, label: &str) -> Result<Decision> {
        let run = decide_mrf_m_star_run(inst, self.limits)?;
        Ok(self.finish(run, label))
    }

    fn finish(&self, run: DecisionRun, label: &str) -> Decision {
        self.dump(label, &run.lp);
        run.decision
    }

    fn solve(&self, inst: &Instance, dest: Option<&Path>) -> Result<String> {
        let mut out = String::new();
        match inst {
            Instance::Mrf(i) => {
                let sol = solve_mrf(i, self.limits)?;
                if self.dump_lp {
                    self.run_mrf(i, &sol.value, "mrf")?;
                }
                let _ = writeln!(out, "value {}", sol.value);
                let _ = writeln!(out, "worst_loss {}", sol.worst_loss);
                let names: Vec<&str> = sol
                    .worst_scenario
                    .arcs()
                    .map(|a| i.graph.arc(a).name.as_str())
                    .collect();
                let _ = writeln!(out, "worst_scenario {}", names.join(" "));
                emit_witness(&mut out, &sol.flow, &i.graph, &[], dest)?;
            }
            Instance::MrfR(i) => {
                let d = self.run_mrf_r(i, "mrf_r")?;
                let _ = writeln!(out, "value {}", d.value);
                let _ = writeln!(out, "demand {}", i.demand);
                if let Some(flow) = &d.witness {
                    emit_witness(&mut out, flow, &i.graph, &[], dest)?;
                }
            }
            Instance::MrfM(i) => {
                let d = self.run_mrf_m(i, "mrf_m")?;
                let total: Rational = i.commodities.iter().map(|c| &c.demand).sum();
                let _ = writeln!(out, "value {}", d.value);
                let _ = writeln!(out, "demand {total}");
                if let Some(flow) = &d.witness {
                    emit_witness(&mut out, flow, &i.graph, &i.commodities, dest)?;
                }
            }
            other => return Err(flow_instance_expected(other)),
        }
        Ok(out)
    }

    fn decide(&self, inst: &Instance, threshold: Option<Rational>, dest: Option<&Path>) -> Result<String> {
        let mut out = String::new();
        let (decision, graph, commodities) = match inst {
            Instance::Mrf(i) => {
                let l = mrf_threshold(i, threshold)?;
                let d = self.run_mrf(i, &l, "mrf")?;
                report(&mut out, &d);
                let _ = writeln!(out, "threshold {l}");
                (d, &i.graph, &[][..])
            }
            Instance::MrfR(i) => {
                let posed = with_demand(i, threshold);
                let d = self.run_mrf_r(&posed, "mrf_r")?;
                report(&mut out, &d);
                let _ = writeln!(out, "demand {}", posed.demand);
                (d, &i.graph, &[][..])
            }
            Instance::MrfM(i) => {
                if threshold.is_some() {
                    return Err(Error::precondition("--threshold does not apply to mrf_m instances"));
                }
                let d = self.run_mrf_m(i, "mrf_m")?;
                report(&mut out, &d);
                (d, &i.graph, &i.commodities[..])
            }
            other => return Err(flow_instance_expected(other)),
        };
        if let Some(flow) = &decision.witness {
            emit_witness(&mut out, flow, graph, commodities, dest)?;
        } else if decision.yes {
            let _ = writeln!(out, "witness omitted: too many paths");
        }
        Ok(out)
    }

    fn check(&self, inst: &Instance, threshold: Option<Rational>, text: &str) -> Result<String> {
        let report = match inst {
            Instance::Mrf(i) => {
                let l = mrf_threshold(i, threshold)?;
                check_mrf_witness(i, &parse_flow(text, &i.graph, &[])?, &l, self.limits)?
            }
            Instance::MrfR(i) => {
                let posed = with_demand(i, threshold);
                check_mrf_r_witness(&posed, &parse_flow(text, &i.graph, &[])?, self.limits)?
            }
            Instance::MrfM(i) => check_mrf_m_witness(i, &parse_flow(text, &i.graph, &i.commodities)?, self.limits)?,
            other => return Err(flow_instance_expected(other)),
        };
        let graph = inst.graph().expect("flow instance");
        let names: Vec<&str> = report
            .worst_scenario
            .arcs()
            .map(|a| graph.arc(a).name.as_str())
            .collect();
        let mut out = String::from("witness valid\n");
        let _ = writeln!(out, "shipped {}", report.shipped);
        let _ = writeln!(out, "worst_loss {}", report.worst_loss);
        let _ = writeln!(out, "worst_scenario {}", names.join(" "));
        Ok(out)
    }

    fn verify(&self, inst: &Instance, until: Stage) -> Result<String> {
        let mut log = StageLog::default();
        match inst {
            Instance::Coloring { graph, colors } => {
                let (chi, _) = fractional_chromatic_number(graph, self.limits)?;
                log.record("oracle chif", chi <= Rational::from(*colors), &chi);
                let art = reduce_coloring_to_mrfr(graph, *colors)?;
                self.verify_restricted(&mut log, &art.output, until)?;
            }
            Instance::CliqueInterdiction {
                graph,
                clique_size,
                removals,
            } => {
                let found = clique_interdiction_bruteforce(graph, *clique_size, *removals, self.limits)?;
                let size = found.as_ref().map_or(0, Vec::len);
                log.record("oracle clique-interdiction", found.is_some(), &Rational::from(size));
                let art = reduce_clique_interdiction(graph, *clique_size, *removals)?;
                self.verify_restricted(&mut log, &art.output, until)?;
            }
            Instance::MrfR(i) => self.verify_restricted(&mut log, i, until)?,
            Instance::MrfM(i) => {
                let d = self.run_mrf_m(i, "mrf_m")?;
                log.record("mrf_m", d.yes, &d.value);
                if until == Stage::Mrf {
                    self.verify_plain(&mut log, i)?;
                }
            }
            Instance::Mrf(i) => {
                let sol = solve_mrf(i, self.limits)?;
                let rni = solve_rni(i, self.limits)?;
                let _ = writeln!(log.text, "mrf: value {}", sol.value);
                let _ = writeln!(log.text, "rni: value {}", rni.value);
                if sol.value != rni.value {
                    return Err(Error::validation(
                        "verify",
                        format!("robust flow and interdiction values differ\n{}", log.text),
                    ));
                }
                if let Some(l) = &i.threshold {
                    let d = self.run_mrf(i, l, "mrf")?;
                    log.record("mrf threshold", d.yes, &d.value);
                }
            }
        }
        log.finish()
    }

    fn verify_restricted(&self, log: &mut StageLog, inst: &MrfRInstance, until: Stage) -> Result<()> {
        let d = self.run_mrf_r(inst, "mrf_r")?;
        log.record("mrf_r", d.yes, &d.value);
        if inst.integral {
            if until > Stage::Mrfr {
                let _ = writeln!(log.text, "integral instance: later stages skipped");
            }
            return Ok(());
        }
        if until == Stage::Mrfr {
            return Ok(());
        }
        let normalized = normalize_mrfr(inst)?;
        let d = self.run_mrf_r(&normalized.output, "mrf_r normalized")?;
        log.record("mrf_r normalized", d.yes, &d.value);
        let multi = reduce_mrfr_to_mrfm(&normalized.output)?;
        let properties = check_properties(&multi);
        if let Some(fail) = properties.first_failure() {
            return Err(Error::precondition(format!(
                "property {} fails: {}",
                fail.property, fail.detail
            )));
        }
        let _ = writeln!(log.text, "properties: hold");
        let d = self.run_mrf_m(&multi.output, "mrf_m")?;
        log.record("mrf_m", d.yes, &d.value);
        if until == Stage::Mrf {
            self.verify_plain(log, &multi.output)?;
        }
        Ok(())
    }

    fn verify_plain(&self, log: &mut StageLog, inst: &MrfMInstance) -> Result<()> {
        let wrapped = reduce_mrfm_to_mrf(inst)?;
        let expanded = expand_immune(&wrapped.output)?;
        let l = expanded.output.threshold.clone().expect("wrapper sets a threshold");
        let d = self.run_mrf(&wrapped.output, &l, "mrf with immune arcs")?;
        log.record("mrf with immune arcs", d.yes, &d.value);
        let d = self.run_mrf(&expanded.output, &l, "mrf")?;
        log.record("mrf", d.yes, &d.value);
        Ok(())
    }
}

#[derive(Default)]
struct StageLog {
    text: String,
    answers: Vec<bool>,
}

impl StageLog {
    fn record(&mut self, stage: &str, yes: bool, value: &Rational) {
        let _ = writeln!(self.text, "{stage}: {} (value {value})", answer(yes));
        self.answers.push(yes);
    }

    fn finish(mut self) -> Result<String> {
        if self.answers.windows(2).any(|w| w[0] != w[1]) {
            return Err(Error::validation(
                "verify",
                format!("stage decisions disagree\n{}", self.text),
            ));
        }
        self.text.push_str("consistent\n");
        Ok(self.text)
    }
}

fn report(out: &mut String, d: &Decision) {
    let _ = writeln!(out, "{}", answer(d.yes));
    let _ = writeln!(out, "value {}", d.value);
}

fn mrf_threshold(inst: &MrfInstance, threshold: Option<Rational>) -> Result<Rational> {
    threshold
        .or_else(|| inst.threshold.clone())
        .ok_or_else(|| Error::precondition("no threshold: pass --threshold or set one in the document"))
}

fn with_demand(inst: &MrfRInstance, demand: Option<Rational>) -> MrfRInstance {
    let mut posed = inst.clone();
    if let Some(d) = demand {
        posed.demand = d;
    }
    posed
}

/// `x.json` becomes `x<suffix>`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let base = if path.extension().is_some_and(|e| e == "json") {
        path.with_extension("")
    } else {
        path.to_path_buf()
    };
    let mut name = base.into_os_string();
    name.push(suffix);
    PathBuf::from(name)
}

fn write_stage(
    log: &mut String,
    path: &Path,
    inst: Instance,
    provenance: &Provenance,
    parameters: &BTreeMap<String, Rational>,
) -> Result<()> {
    write_text(path, &serialize_instance(&inst))?;
    let sidecar = sibling(path, ".provenance.json");
    write_text(&sidecar, &serialize_provenance(provenance, parameters))?;
    let _ = writeln!(log, "wrote {} ({:?})", path.display(), inst.variant());
    let _ = writeln!(log, "wrote {}", sidecar.display());
    Ok(())
}

type Posed = (MrfRInstance, Provenance, BTreeMap<String, Rational>);

/// The restricted instance a reduction chain starts from: graph instances
/// are reduced first, restricted instances pass through.
fn restricted_source(inst: &Instance) -> Result<Option<Posed>> {
    Ok(match inst {
        Instance::Coloring { graph, colors } => {
            let art = reduce_coloring_to_mrfr(graph, *colors)?;
            Some((art.output, art.provenance, art.parameters))
        }
        Instance::CliqueInterdiction {
            graph,
            clique_size,
            removals,
        } => {
            let art = reduce_clique_interdiction(graph, *clique_size, *removals)?;
            Some((art.output, art.provenance, art.parameters))
        }
        _ => None,
    })
}

fn fractional(inst: &MrfRInstance) -> Result<()> {
    if inst.integral {
        return Err(Error::precondition("integral instances have no multicommodity form"));
    }
    Ok(())
}

fn reduce(inst: &Instance, to: Target, out: &Path) -> Result<String> {
    let mut log = String::new();
    let reduced = restricted_source(inst)?;
    let restricted = match (&reduced, inst) {
        (Some((r, _, _)), _) => Some(r),
        (None, Instance::MrfR(r)) => Some(r),
        _ => None,
    };
    match (to, restricted, inst) {
        (Target::Mrfr, Some(r), _) => match &reduced {
            Some((_, provenance, parameters)) => {
                write_stage(&mut log, out, Instance::MrfR(r.clone()), provenance, parameters)?;
            }
            None => {
                let art = normalize_mrfr(r)?;
                write_stage(
                    &mut log,
                    out,
                    Instance::MrfR(art.output),
                    &art.provenance,
                    &art.parameters,
                )?;
            }
        },
        (Target::Mrfm, Some(r), _) => {
            fractional(r)?;
            let normalized = normalize_mrfr(r)?;
            let art = reduce_mrfr_to_mrfm(&normalized.output)?;
            write_stage(
                &mut log,
                out,
                Instance::MrfM(art.output),
                &art.provenance,
                &art.parameters,
            )?;
        }
        (Target::Mrf, Some(r), _) => {
            fractional(r)?;
            let p = mrfr_to_mrf(r)?;
            let mut parameters = p.wrapped.parameters.clone();
            parameters.extend(p.expanded.parameters.clone());
            write_stage(
                &mut log,
                out,
                Instance::Mrf(p.expanded.output),
                &p.expanded.provenance,
                &parameters,
            )?;
        }
        (Target::Mrf, None, Instance::MrfM(m)) => {
            let wrapped = reduce_mrfm_to_mrf(m)?;
            let expanded = expand_immune(&wrapped.output)?;
            let mut parameters = wrapped.parameters;
            parameters.extend(expanded.parameters);
            write_stage(
                &mut log,
                out,
                Instance::Mrf(expanded.output),
                &expanded.provenance,
                &parameters,
            )?;
        }
        (Target::Full, Some(r), _) => {
            fractional(r)?;
            let p = mrfr_to_mrf(r)?;
            let (first, provenance, parameters) = match reduced {
                Some((r, provenance, parameters)) => (r, provenance, parameters),
                None => (
                    p.normalized.output.clone(),
                    p.normalized.provenance.clone(),
                    p.normalized.parameters.clone(),
                ),
            };
            write_stage(
                &mut log,
                &sibling(out, ".mrf_r.json"),
                Instance::MrfR(first),
                &provenance,
                &parameters,
            )?;
            let multi = &p.multicommodity;
            write_stage(
                &mut log,
                &sibling(out, ".mrf_m.json"),
                Instance::MrfM(multi.output.clone()),
                &multi.provenance,
                &multi.parameters,
            )?;
            let mut parameters = p.wrapped.parameters.clone();
            parameters.extend(p.expanded.parameters.clone());
            write_stage(
                &mut log,
                &sibling(out, ".mrf.json"),
                Instance::Mrf(p.expanded.output),
                &p.expanded.provenance,
                &parameters,
            )?;
        }
        _ => {
            return Err(Error::precondition(format!(
                "cannot reduce a {:?} instance to {}",
                inst.variant(),
                to.name()
            )))
        }
    }
    Ok(log)
}

impl Target {
    fn name(self) -> &'static str {
        match self {
            Target::Mrfr => "mrfr",
            Target::Mrfm => "mrfm",
            Target::Mrf => "mrf",
            Target::Full => "full",
        }
    }
}

fn graph_of(inst: &Instance) -> Result<&UndirectedGraph> {
    match inst {
        Instance::Coloring { graph, .. } | Instance::CliqueInterdiction { graph, .. } => Ok(graph),
        other => Err(Error::precondition(format!(
            "{:?} instances carry no undirected graph",
            other.variant()
        ))),
    }
}

fn oracle(which: OracleKind, inst: &Instance, limits: &Limits) -> Result<String> {
    let mut out = String::new();
    match which {
        OracleKind::Chif => {
            let (chi, coloring) = fractional_chromatic_number(graph_of(inst)?, limits)?;
            let _ = writeln!(out, "chi_f {chi}");
            if let Instance::Coloring { colors, .. } = inst {
                let _ = writeln!(out, "{} (colors {colors})", answer(chi <= Rational::from(*colors)));
            }
            for (set, weight) in &coloring.0 {
                let members: Vec<String> = set.iter().map(usize::to_string).collect();
                let _ = writeln!(out, "weight {weight}: {}", members.join(" "));
            }
        }
        OracleKind::CliqueInterdiction => {
            let Instance::CliqueInterdiction {
                graph,
                clique_size,
                removals,
            } = inst
            else {
                return Err(Error::precondition(format!(
                    "expected a clique_interdiction instance, got {:?}",
                    inst.variant()
                )));
            };
            match clique_interdiction_bruteforce(graph, *clique_size, *removals, limits)? {
                Some(set) => {
                    let members: Vec<String> = set.iter().map(usize::to_string).collect();
                    let _ = writeln!(out, "YES");
                    let _ = writeln!(out, "removed {}", members.join(" "));
                }
                None => {
                    let _ = writeln!(out, "NO");
                }
            }
        }
    }
    Ok(out)
}

fn gen(spec: &str, out: Option<&Path>) -> Result<String> {
    let text = if spec.trim_start().starts_with('{') {
        spec.to_string()
    } else {
        read_text(Path::new(spec))?
    };
    let spec: GeneratorSpec = serde_json::from_str(&text).map_err(|e| Error::parse("spec", e.to_string()))?;
    let doc = serialize_instance(&generate(&spec)?);
    match out {
        Some(path) => {
            write_text(path, &doc)?;
            Ok(format!("wrote {}\n", path.display()))
        }
        None => Ok(doc),
    }
}
