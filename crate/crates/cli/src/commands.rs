use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use pfacap::capacity::{
    blahut_arimoto, capacity_bracket, converse_check, lift, parse_dmc, spectrum_concentration_demo,
    stability_schedule, BracketOptions, DemoOptions, DemoStage, UpperCertificate,
};
use pfacap::fsmc::{parse_fsmc, sample, write_fsmc};
use pfacap::gadgets::{
    build_b_p, build_c_p, build_d_ay, build_d_xy, build_family_member, sigma_decode, sigma_encode,
    SigmaCode,
};
use pfacap::pfa::{
    brute_force_value, emptiness_semidecide, fixtures, parse_pfa, write_pfa, SearchBudget,
};
use pfacap::rational::{format_rational, format_real, parse_rational, to_f64};
use pfacap::witness::{witness_sweep, WitnessMode, WitnessParams};
use pfacap::{Pfa, Word};
use sha2::{Digest, Sha256};

use crate::args::{
    CapacityCmd, ChannelCmd, Command, GadgetCmd, PfaCmd, SigmaCmd, StabilityCmd, WitnessArgs,
};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct InputRecord {
    pub source: String,
    /// `builtin` for built-in automata.
    pub sha256: String,
}

/// Everything a command produces; nothing touches the disk until the
/// caller decides where it goes.
#[derive(Debug, Default)]
pub struct Output {
    pub stdout: String,
    pub files: Vec<(String, Vec<u8>)>,
    pub inputs: Vec<InputRecord>,
    pub seed: Option<u64>,
    /// Set when the command ran but its check failed (exit code 1).
    pub failure: Option<String>,
}

impl Output {
    fn line(&mut self, text: impl AsRef<str>) {
        self.stdout.push_str(text.as_ref());
        self.stdout.push('\n');
    }

    fn file(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents.into_bytes()));
    }

    fn read_input(&mut self, path: &Path) -> Result<String> {
        let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
        self.inputs.push(InputRecord {
            source: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        });
        String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))
    }

    fn load_pfa(&mut self, spec: &str) -> Result<Pfa> {
        let path = Path::new(spec);
        if path.is_file() {
            let text = self.read_input(path)?;
            return parse_pfa(&text).with_context(|| format!("{spec}"));
        }
        match fixtures::by_name(spec) {
            Some(p) => {
                self.inputs.push(InputRecord {
                    source: spec.to_string(),
                    sha256: "builtin".into(),
                });
                Ok(p)
            }
            None => bail!(
                "`{spec}` is neither a file nor a built-in automaton ({})",
                fixtures::BUILTIN_NAMES.join(", ")
            ),
        }
    }
}

fn rational(text: &str, what: &str) -> Result<pfacap::Rational> {
    parse_rational(text).with_context(|| format!("bad {what} `{text}`"))
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| anyhow!("{e}"))?)?)
}

pub fn execute(command: &Command) -> Result<Output> {
    let mut out = Output::default();
    match command {
        Command::Pfa(cmd) => pfa(cmd, &mut out)?,
        Command::Gadget(cmd) => gadget(cmd, &mut out)?,
        Command::Witness(args) => witness(args, &mut out)?,
        Command::Channel(cmd) => channel(cmd, &mut out)?,
        Command::Capacity(cmd) => capacity(cmd, &mut out)?,
        Command::Sigma(cmd) => sigma(cmd, &mut out)?,
        Command::Replay { .. } => unreachable!("replay is handled by the caller"),
    }
    Ok(out)
}

fn pfa(cmd: &PfaCmd, out: &mut Output) -> Result<()> {
    match cmd {
        PfaCmd::Validate(input) => {
            let p = out.load_pfa(&input.pfa)?;
            let fr = p.detect_freeze_reset();
            out.line(format!(
                "ok: {} states, alphabet [{}], accepting [{}], freeze {}, reset {}",
                p.num_states(),
                p.alphabet().join(", "),
                p.accepting().iter().map(|&s| p.states()[s].as_str()).collect::<Vec<_>>().join(", "),
                fr.freeze.as_deref().unwrap_or("none"),
                fr.reset.as_deref().unwrap_or("none"),
            ));
        }
        PfaCmd::Value { input, word } => {
            let p = out.load_pfa(&input.pfa)?;
            let w = Word::parse(word, p.alphabet())?;
            out.line(format_rational(&p.value(&w)?));
        }
        PfaCmd::Search {
            input,
            max_len,
            threshold,
            max_words,
        } => {
            let p = out.load_pfa(&input.pfa)?;
            let budget = SearchBudget::words(*max_words);
            match threshold {
                Some(t) => {
                    let delta = rational(t, "threshold")?;
                    match emptiness_semidecide(&p, &delta, *max_len, budget)? {
                        Some(w) => out.line(format!(
                            "found {w} with value {}",
                            format_rational(&p.value(&w)?)
                        )),
                        None => out.line(format!(
                            "none: no word of length <= {max_len} has value > {}",
                            format_rational(&delta)
                        )),
                    }
                }
                None => {
                    let r = brute_force_value(&p, *max_len, budget)?;
                    out.line(format!(
                        "best {} with value {} ({} words of length <= {max_len})",
                        r.best_word,
                        format_rational(&r.best_value),
                        r.words_visited
                    ));
                }
            }
        }
    }
    Ok(())
}

fn gadget(cmd: &GadgetCmd, out: &mut Output) -> Result<()> {
    let built = match cmd {
        GadgetCmd::Dxy { x, y } => build_d_xy(&rational(x, "x")?, &rational(y, "y")?)?,
        GadgetCmd::Day { input, y } => build_d_ay(&out.load_pfa(&input.pfa)?, &rational(y, "y")?)?,
        GadgetCmd::Bp { input, p } => build_b_p(&out.load_pfa(&input.pfa)?, &rational(p, "p")?)?,
        GadgetCmd::Cp { input, p } => build_c_p(&out.load_pfa(&input.pfa)?, &rational(p, "p")?)?,
        GadgetCmd::Family { input, lambda } => {
            build_family_member(&out.load_pfa(&input.pfa)?, &rational(lambda, "lambda")?)?
        }
    };
    out.stdout.push_str(&write_pfa(&built));
    Ok(())
}

fn witness(args: &WitnessArgs, out: &mut Output) -> Result<()> {
    let eps = rational(&args.eps, "eps")?;
    let mode = match (&args.x, &args.pfa, &args.inner) {
        (Some(x), None, None) => WitnessMode::Plain {
            x: rational(x, "x")?,
        },
        (None, Some(p), Some(inner)) => {
            let automaton = out.load_pfa(p)?;
            let inner = Word::parse(inner, automaton.alphabet())?;
            WitnessMode::Lifted { automaton, inner }
        }
        _ => bail!("give either --x, or --pfa with --inner"),
    };
    let x = match &mode {
        WitnessMode::Plain { x } => x.clone(),
        WitnessMode::Lifted { automaton, inner } => automaton.value(inner)?,
    };
    let params = WitnessParams::new(&x, &eps)?;
    let reports = witness_sweep(&eps, args.k, &mode)?;
    out.line(format!(
        "x = {}, eps = {}, b = {}, C = {}",
        format_rational(&x),
        format_rational(&eps),
        params.b.map_or("none (x = 1)".into(), format_real),
        format_real(params.c_eps)
    ));
    let (partial, bound) = params.tail_sum(args.k);
    out.line(format!(
        "sum_(i<=k) (1-x)^n_i = {} <= {}",
        format_real(partial),
        format_real(bound)
    ));
    let mut rows = Vec::new();
    for r in &reports {
        out.line(format!(
            "k={:>3} len={:>6} q1->q3={} q4->q6={} value={} req1={} req2={}",
            r.k,
            r.completed.len(),
            format_real(to_f64(&r.p_q1_q3)),
            format_real(to_f64(&r.p_q4_q6)),
            format_real(to_f64(&r.value)),
            r.requirement1_met,
            r.requirement2_met
        ));
        rows.push(vec![
            r.k.to_string(),
            r.lengths.last().map_or(String::new(), |n| n.to_string()),
            r.tail_length.to_string(),
            r.completed.len().to_string(),
            format_real(to_f64(&r.p_q1_q3)),
            format_real(to_f64(&r.p_q4_q6)),
            format_real(to_f64(&r.value)),
            r.requirement1_met.to_string(),
            r.requirement2_met.to_string(),
        ]);
    }
    let csv = csv_text(
        &[
            "k",
            "n_k",
            "tail_length",
            "word_length",
            "p_q1_q3",
            "p_q4_q6",
            "value",
            "requirement1",
            "requirement2",
        ],
        rows,
    )?;
    out.file("witness.csv", csv);
    if let Some(last) = reports.last() {
        out.file("witness_word.txt", format!("{}\n", last.completed));
    }
    Ok(())
}

fn channel(cmd: &ChannelCmd, out: &mut Output) -> Result<()> {
    match cmd {
        ChannelCmd::Build(input) => {
            let (_, v) = lift(&out.load_pfa(&input.pfa)?)?;
            out.stdout.push_str(&write_fsmc(v.fsmc()));
        }
        ChannelCmd::Sample {
            pfa,
            channel,
            inputs,
            seed,
        } => {
            let fsmc = match (pfa, channel) {
                (Some(p), None) => lift(&out.load_pfa(p)?)?.1.fsmc().clone(),
                (None, Some(path)) => parse_fsmc(&out.read_input(path)?)
                    .with_context(|| path.display().to_string())?,
                _ => bail!("give exactly one of --pfa and --channel"),
            };
            let xs = inputs
                .split_whitespace()
                .map(|label| {
                    fsmc.input_index(label)
                        .ok_or_else(|| anyhow!("unknown input `{label}`"))
                })
                .collect::<Result<Vec<_>>>()?;
            out.seed = Some(*seed);
            let ys = sample(&fsmc, &xs, *seed);
            out.line(
                ys.iter()
                    .map(|&y| fsmc.outputs()[y].as_str())
                    .collect::<Vec<_>>()
                    .join(" "),
            );
        }
    }
    Ok(())
}

fn parse_certificate(text: &str) -> Result<UpperCertificate> {
    let params = text
        .strip_prefix("dxy:")
        .ok_or_else(|| anyhow!("certificate must look like `dxy:<x>,<y>`"))?;
    let (x, y) = params
        .split_once(',')
        .ok_or_else(|| anyhow!("certificate must look like `dxy:<x>,<y>`"))?;
    Ok(UpperCertificate::Dxy {
        x: rational(x.trim(), "certificate x")?,
        y: rational(y.trim(), "certificate y")?,
    })
}

fn capacity(cmd: &CapacityCmd, out: &mut Output) -> Result<()> {
    match cmd {
        CapacityCmd::Bracket {
            input,
            delta,
            budget,
            horizon,
            certificate,
            words,
        } => {
            let p = out.load_pfa(&input.pfa)?;
            let (g, _) = lift(&p)?;
            let extra_words = words
                .iter()
                .map(|w| Word::parse(w, g.alphabet()))
                .collect::<pfacap::Result<Vec<_>>>()?;
            let opts = BracketOptions {
                delta: *delta,
                budget: *budget,
                horizon: *horizon,
                certificate: certificate.as_deref().map(parse_certificate).transpose()?,
                extra_words,
                ..Default::default()
            };
            let b = capacity_bracket(&p, &opts)?;
            out.line(format!("lower = {}", format_real(b.lower)));
            match &b.lower_provenance {
                Some(r) => out.line(format!(
                    "  from word {} (value {}), m = {}, n = {}, delta = {}, {}",
                    r.word,
                    format_real(to_f64(&r.word_value)),
                    r.m,
                    r.n,
                    b.delta,
                    r.method
                )),
                None => out.line("  no candidate gives a positive rate"),
            }
            out.line(format!(
                "upper = {} ({}), {}",
                format_real(b.upper),
                format_rational(&b.upper_exact),
                b.upper_kind
            ));
            out.line(format!("gap = {}", format_real(b.gap())));
            let rows = b.candidates.iter().map(|r| {
                vec![
                    r.block().to_string(),
                    r.m.to_string(),
                    r.n.to_string(),
                    r.word.to_string(),
                    r.method.to_string(),
                    format_real(to_f64(&r.word_value)),
                    format_real(r.rate),
                    format_real(b.upper),
                ]
            });
            let csv = csv_text(
                &["block", "m", "n", "word", "method", "word_value", "lower", "upper"],
                rows,
            )?;
            out.file("bracket.csv", csv);
        }
        CapacityCmd::Ba {
            channel,
            tol,
            max_iters,
        } => {
            let ch = parse_dmc(&out.read_input(channel)?)
                .with_context(|| channel.display().to_string())?;
            let r = blahut_arimoto(&ch, *tol, *max_iters)?;
            out.line(format!("capacity = {}", format_real(r.capacity)));
            out.line(format!(
                "bounds = [{}, {}], gap = {}",
                format_real(r.lower),
                format_real(r.upper),
                format_real(r.gap())
            ));
            out.line(format!(
                "iterations = {}{}",
                r.iterations,
                if r.converged { "" } else { " (not converged)" }
            ));
            out.line(format!(
                "input = [{}]",
                r.input.iter().map(|&p| format_real(p)).collect::<Vec<_>>().join(", ")
            ));
        }
        CapacityCmd::Converse {
            input,
            n,
            trials,
            seed,
            horizon,
        } => {
            let p = out.load_pfa(&input.pfa)?;
            out.seed = Some(*seed);
            let r = converse_check(&p, *n, *trials, *seed, *horizon)?;
            out.line(format!(
                "n = {}, horizon = {}, value over words up to the horizon = {}",
                r.n,
                r.horizon,
                format_rational(&r.val_horizon)
            ));
            out.line(format!(
                "{} trials, {} violations, max rate {}",
                r.trials.len(),
                r.violations,
                format_real(r.max_rate())
            ));
            let rows = r.trials.iter().enumerate().map(|(j, t)| {
                vec![
                    j.to_string(),
                    format_real(t.cond_entropy),
                    format_real(t.output_entropy),
                    format_real(t.rate),
                ]
            });
            out.file(
                "converse.csv",
                csv_text(&["trial", "cond_entropy", "output_entropy", "rate"], rows)?,
            );
            if !r.passed() {
                let cause = match r.persists_at_higher_horizon {
                    Some(true) => "persists with a longer search",
                    _ => "disappears with a longer search: the horizon value was too small",
                };
                out.failure = Some(format!("{} converse violations ({cause})", r.violations));
            }
        }
        CapacityCmd::Stability(cmd) => stability(cmd, out)?,
    }
    Ok(())
}

fn stability(cmd: &StabilityCmd, out: &mut Output) -> Result<()> {
    match cmd {
        StabilityCmd::Schedule { val, delta, n_list } => {
            let s = stability_schedule(*val, *delta, n_list)?;
            let rows: Vec<Vec<String>> = s
                .stages
                .iter()
                .map(|st| {
                    vec![
                        st.t.to_string(),
                        st.n_t.to_string(),
                        st.n_next.to_string(),
                        st.formula.to_string(),
                        st.m_t.to_string(),
                    ]
                })
                .collect();
            for st in &s.stages {
                out.line(format!(
                    "t={} n_t={} n_t+1={} formula={} m_t={}",
                    st.t, st.n_t, st.n_next, st.formula, st.m_t
                ));
            }
            out.line(format!("valid = {}", s.is_valid()));
            out.file(
                "schedule.csv",
                csv_text(&["t", "n_t", "n_next", "formula", "m_t"], rows)?,
            );
        }
        StabilityCmd::Demo {
            pfa,
            word,
            free,
            repeats,
            delta,
            etas,
            samples,
            seed,
        } => {
            let p = out.load_pfa(pfa)?;
            let (g, _) = lift(&p)?;
            let word = Word::parse(word, g.alphabet())?;
            out.seed = Some(*seed);
            let block = word.len() + free;
            let repeats = match repeats {
                Some(r) => *r,
                None => {
                    let v = to_f64(&g.value(&word)?);
                    stability_schedule(v, *delta, &[block, block])?.stages[0].m_t as usize
                }
            };
            let r = spectrum_concentration_demo(
                &p,
                &[DemoStage {
                    word,
                    free: *free,
                    repeats,
                }],
                &DemoOptions {
                    delta: *delta,
                    etas: etas.clone(),
                    samples: *samples,
                    seed: *seed,
                    val: None,
                },
            )?;
            out.line(format!(
                "n = {} ({} blocks of {}), E[i] = {}, C_n = {}, val = {}",
                r.n,
                repeats,
                block,
                format_real(r.mean),
                format_real(r.c_n),
                format_real(r.val)
            ));
            let mut rows = Vec::new();
            for row in &r.rows {
                let mut line = String::new();
                write!(
                    line,
                    "eta={} empirical={} (sigma {}) analytic={} exact_range={}",
                    row.eta,
                    format_real(row.empirical),
                    format_real(row.sigma),
                    format_real(row.paper_bound),
                    format_real(row.exact_range_bound)
                )?;
                out.line(line);
                rows.push(vec![
                    row.eta.to_string(),
                    format_real(row.empirical),
                    format_real(row.sigma),
                    format_real(row.paper_bound),
                    format_real(row.empirical_val),
                    format_real(row.paper_bound_val),
                    format_real(row.exact_range_bound),
                ]);
            }
            out.file(
                "stability_demo.csv",
                csv_text(
                    &[
                        "eta",
                        "empirical",
                        "sigma",
                        "analytic",
                        "empirical_val",
                        "analytic_val",
                        "exact_range",
                    ],
                    rows,
                )?,
            );
        }
    }
    Ok(())
}

fn sigma(cmd: &SigmaCmd, out: &mut Output) -> Result<()> {
    match cmd {
        SigmaCmd::Encode { values } => {
            let rs = values
                .iter()
                .map(|v| rational(v, "rational"))
                .collect::<Result<Vec<_>>>()?;
            out.line(sigma_encode(&rs)?.to_string());
        }
        SigmaCmd::Decode { code, arity } => {
            let value = code
                .parse()
                .map_err(|_| anyhow!("`{code}` is not a natural number"))?;
            let rs = sigma_decode(&SigmaCode {
                value,
                arity: *arity,
            })?;
            out.line(rs.iter().map(format_rational).collect::<Vec<_>>().join(" "));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certificate_syntax() {
        let UpperCertificate::Dxy { x, y } = parse_certificate("dxy:2/5, 1/2").unwrap();
        assert_eq!((x, y), (pfacap::rational::rat(2, 5), pfacap::rational::rat(1, 2)));
        assert!(parse_certificate("2/5,1/2").is_err());
        assert!(parse_certificate("dxy:2/5").is_err());
    }

    #[test]
    fn builtins_are_recorded_without_digest() {
        let mut out = Output::default();
        out.load_pfa("example1").unwrap();
        assert_eq!(out.inputs[0].sha256, "builtin");
        assert!(out.load_pfa("no-such-automaton").is_err());
    }
}
