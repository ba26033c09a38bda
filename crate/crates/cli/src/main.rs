use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use dsttr::ds::{load_grammar, Lexicon};
use dsttr::eval::{
    build_revisions, corpus_stats, evaluate_generation, evaluate_repairs, generable_specs, load_corpus,
    load_revisions, save_revisions, substitution_lexicon, CorpusEntry, NormalizationTable,
};
use dsttr::generate::{GenConfig, GenSession, StepOutcome, TraceEvent, DEFAULT_INTERREGNUM};
use dsttr::model::{train, ConditionalModel, Normalization};
use dsttr::parser::{parse_utterance, tokenize};
use dsttr::repair::{annotate, default_interregna, RevisionEvent};
use dsttr::ttr::{parse_rt, RecordType};

#[derive(Parser)]
#[command(name = "dsttr", version, about = "Incremental generation with Dynamic Syntax and record types")]
struct Cli {
    /// Print structured JSON instead of key=value lines.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count word/feature co-occurrences along gold parses and save a model.
    Train {
        #[arg(long)]
        lexicon: PathBuf,
        #[arg(long, required = true, num_args = 1..)]
        corpus: Vec<PathBuf>,
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        /// Normalize each feature column over words instead of per word.
        #[arg(long)]
        column: bool,
    },
    /// Generate an utterance for a goal record type.
    Generate {
        #[command(flatten)]
        gen: GenArgs,
        /// Goal record type, e.g. `[x=john:e, head=x:e]`.
        #[arg(long)]
        goal: String,
        /// Revision events, one `index<TAB>record type` per line.
        #[arg(long)]
        revisions: Option<PathBuf>,
    },
    /// Step generation interactively from standard input.
    Repl {
        #[command(flatten)]
        gen: GenArgs,
    },
    /// Regenerate every corpus goal and score against the utterances.
    Eval {
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long, required = true, num_args = 1..)]
        corpus: Vec<PathBuf>,
        /// Contraction table, one `token<TAB>expansion` per line.
        #[arg(long)]
        norm_table: Option<PathBuf>,
    },
    /// Run revision specs and score the cleaned output per condition.
    EvalRepairs {
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long)]
        revisions: PathBuf,
        #[arg(long)]
        norm_table: Option<PathBuf>,
        /// Score only specs whose goals the model realizes without any dead end.
        #[arg(long)]
        generable_only: bool,
    },
    /// Build revision specs from a POS-tagged corpus.
    Revisions {
        #[arg(long)]
        lexicon: PathBuf,
        #[arg(long, required = true, num_args = 1..)]
        corpus: Vec<PathBuf>,
    },
    /// Dataset statistics.
    Stats {
        #[arg(long, required = true, num_args = 1..)]
        corpus: Vec<PathBuf>,
    },
    /// Parse an utterance and print the context DAG.
    Trace {
        #[arg(long)]
        lexicon: PathBuf,
        utterance: String,
    },
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    lexicon: PathBuf,
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    beam: u32,
    #[arg(long, default_value = DEFAULT_INTERREGNUM)]
    interregnum: String,
}

impl GenArgs {
    fn config(&self) -> GenConfig {
        GenConfig {
            interregnum: self.interregnum.split_whitespace().map(str::to_owned).collect(),
            ..GenConfig::with_beam(self.beam as usize)
        }
    }

    fn load(&self) -> Result<(Lexicon, ConditionalModel)> {
        let lexicon = read_lexicon(&self.lexicon)?;
        let text = read(&self.model)?;
        let model = ConditionalModel::load(&text).with_context(|| format!("{}", self.model.display()))?;
        Ok((lexicon, model))
    }

    fn interregna(&self) -> Vec<Vec<String>> {
        let mut out = default_interregna();
        let own: Vec<String> = self.interregnum.split_whitespace().map(str::to_owned).collect();
        if !own.is_empty() && !out.contains(&own) {
            out.push(own);
        }
        out
    }
}

/// Failures in the domain (as opposed to bad invocations) exit with 1.
#[derive(Debug)]
struct DomainFailure(String);

impl std::fmt::Display for DomainFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for DomainFailure {}

fn domain(msg: impl Into<String>) -> anyhow::Error {
    DomainFailure(msg.into()).into()
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_lexicon(path: &Path) -> Result<Lexicon> {
    load_grammar(&read(path)?).map_err(|e| domain(format!("{}: {e}", path.display())))
}

fn read_corpus(paths: &[PathBuf]) -> Result<Vec<CorpusEntry>> {
    let mut out = Vec::new();
    for p in paths {
        let entries = load_corpus(&read(p)?).map_err(|e| domain(format!("{}: {e}", p.display())))?;
        out.extend(entries);
    }
    Ok(out)
}

fn read_table(path: Option<&PathBuf>) -> Result<NormalizationTable> {
    match path {
        None => Ok(NormalizationTable::default()),
        Some(p) => NormalizationTable::parse(&read(p)?).map_err(|e| domain(format!("{}: {e}", p.display()))),
    }
}

fn goal(text: &str) -> Result<RecordType> {
    parse_rt(text).map_err(|e| domain(format!("bad goal: {e}")))
}

fn read_events(path: &Path) -> Result<Vec<RevisionEvent>> {
    let mut out = Vec::new();
    for (i, line) in read(path)?.lines().enumerate() {
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let (index, rt) = line
            .split_once('\t')
            .ok_or_else(|| domain(format!("{}:{}: expected index<TAB>record type", path.display(), i + 1)))?;
        let index = index
            .trim()
            .parse()
            .map_err(|_| domain(format!("{}:{}: bad index `{index}`", path.display(), i + 1)))?;
        let new_goal = parse_rt(rt).map_err(|e| domain(format!("{}:{}: {e}", path.display(), i + 1)))?;
        out.push(RevisionEvent { index, new_goal });
    }
    out.sort_by_key(|r| r.index);
    Ok(out)
}

fn print_pairs(pairs: &[(&str, String)]) {
    for (k, v) in pairs {
        println!("{k}={v}");
    }
}

fn trace_lines(trace: &[TraceEvent]) -> Vec<String> {
    let mut out = Vec::new();
    for ev in trace {
        match ev {
            TraceEvent::Beam { position, candidates } => {
                for c in candidates {
                    out.push(format!(
                        "beam pos={position} rank={} word={} score={:.4} verdict={}",
                        c.rank, c.word, c.score, c.verdict
                    ));
                }
            }
            TraceEvent::DeadEnd { position, word } => out.push(format!("dead-end pos={position} abandon={word}")),
            TraceEvent::Revision {
                position,
                forward,
                backtracked,
            } => out.push(format!(
                "revision pos={position} kind={} backtracked={backtracked}",
                if *forward { "forward" } else { "backward" }
            )),
        }
    }
    out
}

fn cmd_train(json: bool, lexicon: &Path, corpus: &[PathBuf], model: &Path, alpha: f64, column: bool) -> Result<()> {
    if alpha.is_nan() || alpha < 0.0 {
        bail!("alpha must be nonnegative");
    }
    let lexicon = read_lexicon(lexicon)?;
    let corpus = read_corpus(corpus)?;
    let norm = if column { Normalization::Column } else { Normalization::PerWord };
    let report = train(&corpus, &lexicon, alpha, norm).map_err(|e| domain(e.to_string()))?;
    fs::write(model, report.model.save()).with_context(|| format!("cannot write {}", model.display()))?;
    let skipped: Vec<String> = report
        .skipped
        .iter()
        .map(|s| format!("entry {} `{}`: {}", s.index, s.utterance, s.reason))
        .collect();
    if json {
        println!(
            "{}",
            json!({
                "model": model.display().to_string(),
                "used": report.used,
                "skipped": skipped,
                "vocab": report.model.vocab_size(),
                "features": report.model.feature_count(),
                "tokens": report.model.total_tokens(),
            })
        );
    } else {
        print_pairs(&[
            ("model", model.display().to_string()),
            ("used", report.used.to_string()),
            ("skipped", skipped.len().to_string()),
            ("vocab", report.model.vocab_size().to_string()),
            ("features", report.model.feature_count().to_string()),
            ("tokens", report.model.total_tokens().to_string()),
        ]);
        for s in skipped {
            println!("skip {s}");
        }
    }
    Ok(())
}

fn cmd_generate(json: bool, gen: &GenArgs, goal_text: &str, revisions: Option<&PathBuf>) -> Result<()> {
    let (lexicon, model) = gen.load()?;
    let r_g = goal(goal_text)?;
    let events = match revisions {
        Some(p) => read_events(p)?,
        None => Vec::new(),
    };
    let config = gen.config();
    let mut session = GenSession::new(&model, &lexicon, r_g, config);
    let mut pending = events.iter().peekable();
    let result: Result<(), String> = loop {
        while let Some(r) = pending.peek() {
            if session.spine_len() != r.index && !session.is_done() {
                break;
            }
            session.revise(r.new_goal.clone());
            pending.next();
        }
        if session.is_done() && pending.peek().is_none() {
            break Ok(());
        }
        if let Err(e) = session.step() {
            break Err(e.to_string());
        }
    };
    let surface = annotate(session.surface());
    let clean = session.words().join(" ");
    let trace = trace_lines(session.trace());
    if json {
        println!(
            "{}",
            json!({
                "surface": surface,
                "clean": clean,
                "repaired_edges": session.repaired_edges(),
                "backtracked": session.backtracked(),
                "trace": trace,
                "error": result.as_ref().err(),
            })
        );
    } else {
        print_pairs(&[
            ("surface", surface),
            ("clean", clean),
            ("repaired_edges", session.repaired_edges().to_string()),
            ("backtracked", session.backtracked().to_string()),
        ]);
        for line in trace {
            println!("{line}");
        }
    }
    result.map_err(domain)
}

fn cmd_eval(json: bool, gen: &GenArgs, corpus: &[PathBuf], table: Option<&PathBuf>) -> Result<()> {
    let (lexicon, model) = gen.load()?;
    let corpus = read_corpus(corpus)?;
    let table = read_table(table)?;
    let m = evaluate_generation(&model, &lexicon, &corpus, &gen.config(), &table);
    if json {
        println!("{}", serde_json::to_string(&m)?);
    } else {
        print_pairs(&[
            ("entries", m.entries.to_string()),
            ("generated_to_goal", format!("{:.4}", m.generated_to_goal)),
            ("exact_match", format!("{:.4}", m.exact_match)),
            ("rouge_1", format!("{:.4}", m.rouge_1)),
            ("rouge_2", format!("{:.4}", m.rouge_2)),
            ("rouge_l", format!("{:.4}", m.rouge_l)),
            ("self_repaired", m.self_repaired.to_string()),
        ]);
        for c in m.cases.iter().filter(|c| !c.exact_match) {
            println!("miss ref=\"{}\" out=\"{}\"", c.reference, c.output);
        }
        for w in &m.warnings {
            println!("warning {w}");
        }
    }
    Ok(())
}

fn cmd_eval_repairs(
    json: bool,
    gen: &GenArgs,
    revisions: &Path,
    table: Option<&PathBuf>,
    generable_only: bool,
) -> Result<()> {
    let (lexicon, model) = gen.load()?;
    let specs = load_revisions(&read(revisions)?).map_err(|e| domain(format!("{}: {e}", revisions.display())))?;
    let table = read_table(table)?;
    let config = gen.config();
    let specs = if generable_only {
        generable_specs(&model, &lexicon, &specs, &config)
    } else {
        specs
    };
    let m = evaluate_repairs(&model, &lexicon, &specs, &config, &gen.interregna(), &table);
    if json {
        println!("{}", serde_json::to_string(&m)?);
    } else {
        println!("specs={}", m.cases.len());
        for (name, b) in &m.buckets {
            println!("{name} count={} exact_match={:.4}", b.count, b.exact_match);
        }
        println!("overall={:.4}", m.overall);
    }
    Ok(())
}

fn cmd_revisions(lexicon: &Path, corpus: &[PathBuf]) -> Result<()> {
    let lexicon = read_lexicon(lexicon)?;
    let corpus = read_corpus(corpus)?;
    let build = build_revisions(&corpus, &substitution_lexicon(&corpus), &lexicon);
    print!("{}", save_revisions(&build.specs));
    for w in build.warnings.iter().chain(&build.skipped) {
        eprintln!("{w}");
    }
    Ok(())
}

fn cmd_stats(json: bool, corpus: &[PathBuf]) -> Result<()> {
    let s = corpus_stats(&read_corpus(corpus)?);
    if json {
        println!("{}", serde_json::to_string(&s)?);
    } else {
        print_pairs(&[
            ("samples", s.samples.to_string()),
            ("words", s.tokens.to_string()),
            ("mode_length", s.mode_length.to_string()),
            ("max_length", s.max_length.to_string()),
            ("type_token_ratio", format!("{:.2}", s.type_token_ratio)),
        ]);
    }
    Ok(())
}

fn cmd_trace(json: bool, lexicon: &Path, utterance: &str) -> Result<()> {
    let lexicon = read_lexicon(lexicon)?;
    let tokens = tokenize(utterance);
    let p = parse_utterance(&tokens, &lexicon).map_err(|e| domain(e.to_string()))?;
    if json {
        let prefixes: Vec<String> = p.prefix_semantics.iter().map(ToString::to_string).collect();
        println!(
            "{}",
            json!({
                "grammatical": p.grammatical,
                "prefix_semantics": prefixes,
                "dag": p.dag.dump().lines().collect::<Vec<_>>(),
            })
        );
    } else {
        print!("{}", p.dag.dump());
        println!("grammatical={}", p.grammatical);
    }
    Ok(())
}

struct Repl<'a> {
    lexicon: &'a Lexicon,
    model: &'a ConditionalModel,
    config: GenConfig,
    session: Option<GenSession<'a>>,
}

impl<'a> Repl<'a> {
    fn handle(&mut self, line: &str, out: &mut impl Write) -> io::Result<bool> {
        let line = line.trim();
        let (cmd, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match cmd {
            "" => {}
            "quit" | "exit" => return Ok(false),
            "help" => writeln!(out, "commands: goal <RT> | step | run | revise <RT> | show | reset | quit")?,
            "goal" => match parse_rt(rest.trim()) {
                Ok(g) => {
                    self.session = Some(GenSession::new(self.model, self.lexicon, g, self.config.clone()));
                    writeln!(out, "goal set")?;
                }
                Err(e) => writeln!(out, "error: {e}")?,
            },
            "reset" => {
                self.session = None;
                writeln!(out, "reset")?;
            }
            "step" | "run" | "revise" | "show" => {
                let Some(s) = self.session.as_mut() else {
                    writeln!(out, "usage: set a goal first with `goal <RT>`")?;
                    return Ok(true);
                };
                match cmd {
                    "step" => match s.step() {
                        Ok(StepOutcome::Done) => writeln!(out, "done: {}", annotate(s.surface()))?,
                        Ok(StepOutcome::Emitted) => writeln!(out, "{}", annotate(s.surface()))?,
                        Ok(StepOutcome::Backtracked) => writeln!(out, "dead end, backtracked: {}", annotate(s.surface()))?,
                        Err(e) => writeln!(out, "error: {e}")?,
                    },
                    "run" => match s.run() {
                        Ok(()) => writeln!(out, "done: {}", annotate(s.surface()))?,
                        Err(e) => writeln!(out, "error: {e}")?,
                    },
                    "revise" => match parse_rt(rest.trim()) {
                        Ok(g) => {
                            let forward = s.revise(g);
                            writeln!(
                                out,
                                "{} revision: {}",
                                if forward { "forward" } else { "backward" },
                                annotate(s.surface())
                            )?;
                        }
                        Err(e) => writeln!(out, "error: {e}")?,
                    },
                    _ => {
                        writeln!(out, "tree: {}", s.tree())?;
                        writeln!(out, "r_cur: {}", s.r_cur())?;
                        writeln!(out, "r_inc: {}", s.r_inc())?;
                        writeln!(out, "surface: {}", annotate(s.surface()))?;
                        for (i, (w, score)) in s.beam().iter().enumerate() {
                            writeln!(out, "beam {i} {w} {score:.4}")?;
                        }
                    }
                }
            }
            other => writeln!(out, "unknown command `{other}`; try `help`")?,
        }
        Ok(true)
    }
}

fn cmd_repl(gen: &GenArgs) -> Result<()> {
    let (lexicon, model) = gen.load()?;
    let mut repl = Repl {
        lexicon: &lexicon,
        model: &model,
        config: gen.config(),
        session: None,
    };
    let stdin = io::stdin();
    let mut stdout = io::stdout().lock();
    for line in stdin.lock().lines() {
        if !repl.handle(&line?, &mut stdout)? {
            break;
        }
        stdout.flush()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let json = cli.json;
    match &cli.command {
        Command::Train {
            lexicon,
            corpus,
            model,
            alpha,
            column,
        } => cmd_train(json, lexicon, corpus, model, *alpha, *column),
        Command::Generate { gen, goal, revisions } => cmd_generate(json, gen, goal, revisions.as_ref()),
        Command::Repl { gen } => cmd_repl(gen),
        Command::Eval {
            gen,
            corpus,
            norm_table,
        } => cmd_eval(json, gen, corpus, norm_table.as_ref()),
        Command::EvalRepairs {
            gen,
            revisions,
            norm_table,
            generable_only,
        } => cmd_eval_repairs(json, gen, revisions, norm_table.as_ref(), *generable_only),
        Command::Revisions { lexicon, corpus } => cmd_revisions(lexicon, corpus),
        Command::Stats { corpus } => cmd_stats(json, corpus),
        Command::Trace { lexicon, utterance } => cmd_trace(json, lexicon, utterance),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<DomainFailure>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
