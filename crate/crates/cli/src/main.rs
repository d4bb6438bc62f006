use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use capgram::cfnet::{
    attach_capacity, build_cf_net, build_extended_net, enumerate_controlled, CapacityMode, ControlledOptions,
    Controller, NetKind,
};
use capgram::derive::{decide_membership, filter_pattern, render_word, Membership, SearchBudget, SimplePattern, Word};
use capgram::dot::export_dot;
use capgram::equiv::{check_equal, fragment_of, Side, Verdict};
use capgram::grammar::{Bound, Grammar};
use capgram::petri::{is_k_bounded, reachability_set, run_sequence, Boundedness, CapacityAssignment};
use capgram::regulated::{check_index_bound, enumerate_regulated, RegulatedOptions};
use capgram::text::{parse_grammar, parse_net, parse_partition, print_grammar, print_net, GrammarFile, NetFile};
use capgram::transforms::{
    cf_fin_to_cf_cb, closure_construct, gs_cb_to_blockwise, gs_cb_to_matrix_fin, normalize_capacity_to_one,
    vector_cb_to_vector_fin, CappedGrammar, ClosureOp, Provenance, TransformOptions, DEFAULT_SYMBOL_BUDGET,
};

#[derive(Parser)]
#[command(name = "capgram", version, about = "Capacity-bounded grammars and Petri-net control")]
struct Cli {
    /// Longest terminal word to enumerate.
    #[arg(long, global = true, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    max_len: u64,
    /// State budget per search.
    #[arg(long, global = true, env = "CAPGRAM_MAX_STATES", default_value_t = 2_000_000,
          value_parser = clap::value_parser!(u64).range(1..))]
    max_states: u64,
    /// Open matrix copies allowed at once (vector and semi-matrix modes).
    #[arg(long, global = true, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    max_open: u64,
    /// Concurrent streams in semi-matrix mode.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    semi_streams: u64,
    /// Keep only words matching a pattern such as `a*ccb*`.
    #[arg(long, global = true)]
    filter: Option<String>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a grammar file.
    Validate { file: PathBuf },
    /// List the words up to --max-len.
    Enumerate(EnumerateArgs),
    /// Decide membership of one word.
    Member { file: PathBuf, word: String },
    /// Apply a construction and print the resulting grammar.
    Transform(TransformArgs),
    /// Compare the enumerated fragments of two grammars.
    CheckEqual { left: PathBuf, right: PathBuf },
    /// Petri net tools.
    #[command(subcommand)]
    Net(NetCommand),
    /// Check that every enumerated word has a derivation of index at most k.
    IndexCheck {
        file: PathBuf,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Args)]
struct EnumerateArgs {
    file: PathBuf,
    /// Control derivations with the grammar's cf net or an extended net.
    #[arg(long, value_enum)]
    net: Option<NetChoice>,
    /// Transition partition for h, c and s nets.
    #[arg(long)]
    partition: Option<PathBuf>,
    /// Bound control places too.
    #[arg(long)]
    strong: bool,
    /// Capacity of control places under --strong.
    #[arg(long, default_value_t = 1)]
    control_cap: u32,
    /// Token cap on unbounded control places.
    #[arg(long, default_value_t = 8)]
    max_tokens: u32,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum NetChoice {
    Cf,
    H,
    C,
    S,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Target {
    Cap1,
    Blockwise,
    MatFin,
    VecFin,
    CfCb,
    Star,
    Union,
    Concat,
    Hom,
}

#[derive(Args)]
struct TransformArgs {
    file: PathBuf,
    #[arg(long, value_enum)]
    to: Target,
    /// Second operand for union and concat.
    #[arg(long)]
    with: Option<PathBuf>,
    /// Homomorphism, e.g. `a=xy,b=~`.
    #[arg(long)]
    map: Option<String>,
    /// Constant capacity for cf-cb.
    #[arg(long)]
    k: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_SYMBOL_BUDGET)]
    budget: usize,
    /// Provenance sidecar; defaults to `<out>.prov` when --out is given.
    #[arg(long)]
    provenance: Option<PathBuf>,
}

#[derive(Subcommand)]
enum NetCommand {
    /// Build the cf net (or an h, c, s net) of a context-free grammar.
    Build {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "cf")]
        kind: NetChoice,
        #[arg(long)]
        partition: Option<PathBuf>,
    },
    /// Fire a sequence of transitions from the net's marking.
    Run { file: PathBuf, transitions: Vec<String> },
    /// Reachable markings under the net's capacities.
    Reach {
        file: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        limit: usize,
        /// Also check k-boundedness.
        #[arg(long)]
        bound: Option<u32>,
    },
    /// Graphviz rendering.
    Export { file: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => match emit(cli.out.as_deref(), &text) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        },
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_grammar(path: &Path) -> Result<GrammarFile> {
    parse_grammar(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn load_net(path: &Path) -> Result<NetFile> {
    parse_net(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn load_partition(path: Option<&Path>) -> Result<Vec<(String, Vec<String>)>> {
    let Some(path) = path else { bail!("h, c and s nets need --partition") };
    parse_partition(&read(path)?).with_context(|| format!("{}", path.display()))
}

impl Cli {
    fn budget(&self) -> SearchBudget {
        SearchBudget {
            max_states: self.max_states as usize,
            ..SearchBudget::with_max_len(self.max_len as usize)
        }
    }

    fn regulated(&self) -> RegulatedOptions {
        RegulatedOptions {
            max_open: self.max_open as usize,
            semi_streams: self.semi_streams as usize,
        }
    }

    fn pattern(&self) -> Result<Option<SimplePattern>> {
        self.filter.as_deref().map(SimplePattern::parse).transpose().map_err(Into::into)
    }
}

fn run(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Validate { file } => validate(file),
        Command::Enumerate(args) => enumerate(cli, args),
        Command::Member { file, word } => member(cli, file, word),
        Command::Transform(args) => transform(cli, args),
        Command::CheckEqual { left, right } => {
            let (a, b) = (load_grammar(left)?, load_grammar(right)?);
            let v = check_equal(&a, &b, &cli.budget(), cli.regulated())?;
            Ok(render_verdict(&v))
        }
        Command::Net(cmd) => net(cmd),
        Command::IndexCheck { file, k } => {
            let f = load_grammar(file)?;
            let Some(rg) = &f.regulated else { bail!("index-check needs a grammar with matrices") };
            let c = check_index_bound(rg, *k, &cli.budget(), cli.regulated())?;
            let mut out = format!("holds: {}\nexhaustive: {}\n", c.holds, c.exhaustive);
            if let Some((w, d)) = c.counterexample {
                out.push_str(&format!(
                    "counterexample: {} (index {})\n",
                    render_word(&f.grammar, &w),
                    d.index()
                ));
            }
            Ok(out)
        }
    }
}

fn validate(file: &Path) -> Result<String> {
    let f = load_grammar(file)?;
    let g = &f.grammar;
    let mut out = format!(
        "ok: {} nonterminals, {} terminals, {} rules, {}\n",
        g.nonterminal_count(),
        g.terminal_count(),
        g.rules().len(),
        if g.is_context_free() { "context-free" } else { "non-context-free" }
    );
    if let Some(rg) = &f.regulated {
        out.push_str(&format!("{} matrices, mode {}\n", rg.matrices().len(), rg.mode()));
    }
    Ok(out)
}

fn listing(g: &Grammar, words: &[Word], exhaustive: bool, pattern: Option<&SimplePattern>) -> String {
    let kept;
    let words = match pattern {
        Some(p) => {
            kept = filter_pattern(g, words, p);
            &kept[..]
        }
        None => words,
    };
    let mut out = format!("# exhaustive: {exhaustive}\n");
    for w in words {
        out.push_str(&render_word(g, w));
        out.push('\n');
    }
    out
}

fn enumerate(cli: &Cli, args: &EnumerateArgs) -> Result<String> {
    let f = load_grammar(&args.file)?;
    let pattern = cli.pattern()?;
    let b = cli.budget();
    let Some(choice) = args.net else {
        let frag = fragment_of(&f, &b, cli.regulated())?;
        return Ok(listing(&f.grammar, &frag.words, frag.exhaustive, pattern.as_ref()));
    };
    if f.regulated.is_some() {
        bail!("--net applies to plain context-free grammars");
    }
    let g = &f.grammar;
    let mode = if args.strong {
        if !f.capacity_declared {
            bail!("--strong needs a capacity section");
        }
        Some(CapacityMode::strong(f.capacity.clone(), args.control_cap))
    } else {
        f.capacity_declared.then(|| CapacityMode::weak(f.capacity.clone()))
    };
    let opts = ControlledOptions {
        max_control_tokens: args.max_tokens,
    };
    let e = match choice {
        NetChoice::Cf => {
            let cn = build_cf_net(g)?;
            enumerate_controlled(g, Controller::Cf(&cn), mode.as_ref(), &b, opts)?
        }
        kind => {
            let parts = load_partition(args.partition.as_deref())?;
            let en = build_extended_net(g, net_kind(kind), &parts)?;
            enumerate_controlled(g, Controller::Extended(&en), mode.as_ref(), &b, opts)?
        }
    };
    Ok(listing(g, &e.word_list(), e.exhaustive(), pattern.as_ref()))
}

fn net_kind(c: NetChoice) -> NetKind {
    match c {
        NetChoice::H => NetKind::H,
        NetChoice::C => NetKind::C,
        NetChoice::S => NetKind::S,
        NetChoice::Cf => unreachable!("cf nets have no control places"),
    }
}

fn member(cli: &Cli, file: &Path, word: &str) -> Result<String> {
    let f = load_grammar(file)?;
    let g = &f.grammar;
    let w = match word.trim() {
        "~" | "(empty)" | "" => Vec::new(),
        t => g.parse_word(t)?,
    };
    let answer = match &f.regulated {
        None => match decide_membership(&w, g, &f.capacity, &cli.budget())? {
            Membership::Member(d) => format!("yes\nwitness: {}\n", d.labels(g).join(" ")),
            Membership::NonMember => "no\n".to_owned(),
            Membership::Unknown => "unknown\n".to_owned(),
        },
        Some(rg) => {
            let b = SearchBudget {
                max_terminal_len: w.len(),
                ..cli.budget()
            };
            let e = enumerate_regulated(rg, &b, cli.regulated())?;
            let w = Word(w);
            match e.witness(&w) {
                Some(d) => format!("yes\nwitness: {}\n", d.labels(rg).join(" ")),
                None if e.exhaustive() => "no\n".to_owned(),
                None => "unknown\n".to_owned(),
            }
        }
    };
    Ok(answer)
}

fn render_verdict(v: &Verdict) -> String {
    match v {
        Verdict::Equal => "equal\n".to_owned(),
        Verdict::Inconclusive => "inconclusive\n".to_owned(),
        Verdict::Differs(ws) => {
            let mut out = "differs\n".to_owned();
            for (w, side) in ws {
                let text = if w.is_empty() {
                    "(empty)".to_owned()
                } else if w.iter().all(|s| s.chars().count() == 1) {
                    w.concat()
                } else {
                    w.join(" ")
                };
                let side = match side {
                    Side::Left => "left",
                    Side::Right => "right",
                };
                out.push_str(&format!("only {side}: {text}\n"));
            }
            out
        }
    }
}

fn capped(f: &GrammarFile) -> Result<CappedGrammar> {
    if f.regulated.is_some() {
        bail!("this construction takes a grammar without matrices");
    }
    Ok(CappedGrammar {
        grammar: f.grammar.clone(),
        capacity: f.capacity.clone(),
    })
}

fn parse_map(text: &str) -> Result<Vec<(String, Vec<String>)>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|entry| {
            let Some((from, to)) = entry.split_once('=') else { bail!("bad map entry `{entry}`") };
            let to = to.trim();
            let image = if to == "~" {
                Vec::new()
            } else if to.contains(char::is_whitespace) {
                to.split_whitespace().map(str::to_owned).collect()
            } else {
                to.chars().map(String::from).collect()
            };
            Ok((from.trim().to_owned(), image))
        })
        .collect()
}

fn transform(cli: &Cli, args: &TransformArgs) -> Result<String> {
    let f = load_grammar(&args.file)?;
    let opts = TransformOptions {
        symbol_budget: args.budget,
    };
    let mut input_rules: Vec<String> = f.grammar.rules().iter().map(|r| r.label.clone()).collect();
    let plain = |t: capgram::transforms::Transformed<CappedGrammar>| {
        (GrammarFile::plain(t.output.grammar, Some(t.output.capacity)), t.provenance)
    };
    let (out, provenance): (GrammarFile, Provenance) = match args.to {
        Target::Cap1 => plain(normalize_capacity_to_one(&f.grammar, &f.capacity, &opts)?),
        Target::Blockwise => plain(gs_cb_to_blockwise(&f.grammar, &f.capacity, &opts)?),
        Target::CfCb => {
            let Some(k) = args.k else { bail!("cf-cb needs --k") };
            plain(cf_fin_to_cf_cb(&f.grammar, k)?)
        }
        Target::MatFin => {
            let t = gs_cb_to_matrix_fin(&f.grammar, &f.capacity, &opts)?;
            (GrammarFile::regulated(t.output.grammar), t.provenance)
        }
        Target::VecFin => {
            let Some(rg) = &f.regulated else { bail!("vec-fin needs a vector grammar") };
            let t = vector_cb_to_vector_fin(rg)?;
            (GrammarFile::regulated(t.output), t.provenance)
        }
        Target::Star => plain(closure_construct(&capped(&f)?, ClosureOp::Star, &opts)?),
        Target::Union | Target::Concat => {
            let Some(with) = &args.with else { bail!("union and concat need --with") };
            let h = load_grammar(with)?;
            input_rules.extend(h.grammar.rules().iter().map(|r| r.label.clone()));
            let h = capped(&h)?;
            let op = if args.to == Target::Union { ClosureOp::Union(&h) } else { ClosureOp::Concat(&h) };
            plain(closure_construct(&capped(&f)?, op, &opts)?)
        }
        Target::Hom => {
            let Some(map) = &args.map else { bail!("hom needs --map") };
            let map = parse_map(map)?;
            plain(closure_construct(&capped(&f)?, ClosureOp::Hom(&map), &opts)?)
        }
    };
    let sidecar = args
        .provenance
        .clone()
        .or_else(|| cli.out.as_ref().map(|o| PathBuf::from(format!("{}.prov", o.display()))));
    if let Some(path) = sidecar {
        let rules: Vec<String> = out.grammar.rules().iter().map(|r| r.label.clone()).collect();
        let matrices: Vec<String> = out
            .regulated
            .as_ref()
            .map(|rg| rg.matrices().iter().map(|m| m.label.clone()).collect())
            .unwrap_or_default();
        fs::write(&path, provenance.render(&rules, &matrices, &input_rules))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(print_grammar(&out))
}

fn net(cmd: &NetCommand) -> Result<String> {
    match cmd {
        NetCommand::Build { file, kind, partition } => {
            let f = load_grammar(file)?;
            let g = &f.grammar;
            let cn = build_cf_net(g)?;
            let capacity = if f.capacity_declared && f.capacity.is_all_finite() {
                Some(attach_capacity(&cn, &f.capacity)?)
            } else {
                None
            };
            let nf = if *kind == NetChoice::Cf {
                NetFile {
                    net: cn.net().clone(),
                    marking: cn.initial().clone(),
                    capacity,
                    final_marking: None,
                }
            } else {
                let parts = load_partition(partition.as_deref())?;
                let en = build_extended_net(g, net_kind(*kind), &parts)?;
                let capacity = capacity.map(|mut c| {
                    c.0.resize(en.net().places().len(), Bound::Unbounded);
                    c
                });
                NetFile {
                    net: en.net().clone(),
                    marking: en.initial().clone(),
                    capacity,
                    final_marking: Some(en.final_marking().clone()),
                }
            };
            Ok(print_net(&nf))
        }
        NetCommand::Run { file, transitions } => {
            let nf = load_net(file)?;
            let seq = transitions
                .iter()
                .map(|t| {
                    nf.net
                        .transition_index(t)
                        .with_context(|| format!("unknown transition {t}"))
                })
                .collect::<Result<Vec<_>>>()?;
            let m = run_sequence(&nf.net, &nf.marking, &seq, nf.capacity.as_ref())?;
            let mut out = format!("marking: {}\n", m.render(&nf.net));
            if let Some(fin) = &nf.final_marking {
                out.push_str(&format!("final: {}\n", m == *fin));
            }
            Ok(out)
        }
        NetCommand::Reach { file, limit, bound } => {
            let nf = load_net(file)?;
            let r = reachability_set(&nf.net, &nf.marking, nf.capacity.as_ref(), *limit)?;
            let max = r.markings.iter().map(|m| m.max_tokens()).max().unwrap_or(0);
            let mut out = format!(
                "markings: {}\nexhaustive: {}\nmax tokens: {max}\n",
                r.markings.len(),
                r.exhaustive
            );
            if let Some(k) = bound {
                let verdict = match is_k_bounded(&nf.net, &nf.marking, *k, *limit)? {
                    Boundedness::Bounded => "yes".to_owned(),
                    Boundedness::Exceeded(m) => format!("no, {}", m.render(&nf.net)),
                    Boundedness::Unknown => "unknown".to_owned(),
                };
                out.push_str(&format!("{k}-bounded: {verdict}\n"));
            }
            Ok(out)
        }
        NetCommand::Export { file } => {
            let nf = load_net(file)?;
            let cap: Option<&CapacityAssignment> = nf.capacity.as_ref();
            Ok(export_dot(&nf.net, Some(&nf.marking), cap))
        }
    }
}
