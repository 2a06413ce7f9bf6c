use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use semnet::classifier::{self, ClassifierConfig, ScoreMode};
use semnet::dot::{export_dot, DotOptions};
use semnet::experiment::{report_json, report_text, run_experiment, StagedFixture};
use semnet::io::{load_repository, save_repository, to_canonical_json};
use semnet::model::{Provenance, Repository, Taxonomy, TaxonomyNode};
use semnet::query::{evaluate, parse_query, select_links, LinkContextDef};
use semnet::reasoner::{check_consistency_with, closure, render_derivation, RuleSet, DEFAULT_RULES};
use semnet::segmenter::{segment, LoudnessEnvelope, SegmenterConfig, TriggerEvent};
use semnet::store::{render_term, StatementStore};

/// Educational semantic nets: inference, consistency checks, link contexts,
/// keyword classification and lecture segmentation.
#[derive(Parser)]
#[command(name = "semnet", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RulesArg {
    /// Rule file replacing the built-in rules
    #[arg(long, value_name = "FILE")]
    rules: Option<PathBuf>,
}

impl RulesArg {
    fn load(&self) -> Result<RuleSet> {
        match &self.rules {
            Some(path) => Ok(RuleSet::parse(&read(path)?).with_context(|| format!("in {}", path.display()))?),
            None => Ok(RuleSet::default()),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Validate a repository file and summarize it
    Ingest {
        repository: PathBuf,
        /// Also write the file in canonical form
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Close a repository under the rules and write the result
    Infer {
        repository: PathBuf,
        #[arg(short, long, value_name = "FILE")]
        output: PathBuf,
        #[command(flatten)]
        rules: RulesArg,
    },
    /// Report contradicting relations; exits 1 when there are any
    Check {
        repository: PathBuf,
        /// Close the repository before checking
        #[arg(long)]
        close: bool,
        /// Also write the findings as JSON
        #[arg(long, value_name = "FILE")]
        json: Option<PathBuf>,
        #[command(flatten)]
        rules: RulesArg,
    },
    /// Spot vocabulary terms in a transcript and classify it
    Classify {
        /// JSON list of {canonical, variants, nodes}
        #[arg(long, value_name = "FILE")]
        vocabulary: PathBuf,
        /// Repository (or taxonomy-only) file providing the taxonomy
        #[arg(long, value_name = "FILE")]
        taxonomy: PathBuf,
        /// JSON token list from a recognizer
        #[arg(long, value_name = "FILE", conflicts_with = "text", required_unless_present = "text")]
        tokens: Option<PathBuf>,
        /// Plain text transcript
        #[arg(long, value_name = "FILE")]
        text: Option<PathBuf>,
        /// Minimum score of a reported node
        #[arg(long, default_value_t = 0.5)]
        significance: f64,
        #[arg(long, default_value_t = 50)]
        partition_size: usize,
        /// Restrict spotting and scoring to this taxonomy subtree
        #[arg(long, value_name = "NODE")]
        branch: Option<String>,
        /// Score against all spotted terms instead of the node's own hits
        #[arg(long)]
        unrestricted: bool,
        #[arg(long, value_name = "FILE")]
        json: Option<PathBuf>,
    },
    /// Cut a lecture recording at pauses near slide-change triggers
    Segment {
        /// JSON {"sample_period": s, "values": [dB, ...]}
        #[arg(long, value_name = "FILE")]
        envelope: PathBuf,
        /// JSON list of {time, kind}
        #[arg(long, value_name = "FILE")]
        triggers: PathBuf,
        /// Search half-width around each trigger, seconds
        #[arg(long, default_value_t = 10.0)]
        window: f64,
        /// Shortest pause used for a cut, seconds
        #[arg(long, default_value_t = 0.5)]
        min_pause: f64,
    },
    /// Evaluate a query or link context over a statement store
    Query {
        #[arg(long, value_name = "FILE")]
        store: PathBuf,
        /// Query text file
        #[arg(long, value_name = "FILE", conflicts_with = "context", required_unless_present = "context")]
        query: Option<PathBuf>,
        /// Link context definition (JSON)
        #[arg(long, value_name = "FILE")]
        context: Option<PathBuf>,
    },
    /// Run the staged yield experiment on a fixture
    Experiment {
        fixture: PathBuf,
        /// Write the JSON report here
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
        #[command(flatten)]
        rules: RulesArg,
    },
    /// Write the semantic net as a Graphviz digraph
    ExportDot {
        repository: PathBuf,
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
        /// Draw both directions of inverse pairs
        #[arg(long)]
        all_directions: bool,
        /// Leave out incorrectness findings
        #[arg(long)]
        no_incorrect: bool,
    },
    /// Show or validate rule files
    Rules {
        /// Print the built-in rule file
        #[arg(long, conflicts_with = "validate", required_unless_present = "validate")]
        dump: bool,
        /// Parse a rule file and report its rules
        #[arg(long, value_name = "FILE")]
        validate: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn load_repo(path: &Path) -> Result<Repository> {
    load_repository(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_taxonomy(path: &Path) -> Result<Taxonomy> {
    #[derive(serde::Deserialize)]
    struct TaxonomyFile {
        taxonomy: Vec<TaxonomyNode>,
    }
    let file: TaxonomyFile = load_json(path)?;
    Ok(Taxonomy::new(file.taxonomy)?)
}

/// Runs a subcommand; `Ok(false)` means "completed, but report failure".
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Ingest { repository, output } => {
            let repo = load_repo(&repository)?;
            println!(
                "{}: {} objects, {} taxonomy nodes, {} relations",
                repository.display(),
                repo.object_count(),
                repo.taxonomy().len(),
                repo.fact_count()
            );
            if let Some(output) = output {
                write(&output, &save_repository(&repo))?;
            }
        }
        Command::Infer {
            repository,
            output,
            rules,
        } => {
            let rules = rules.load()?;
            let repo = load_repo(&repository)?;
            let result = closure(&repo, &rules);
            write(&output, &save_repository(&result.repository))?;
            println!(
                "inferred {} facts in {} rounds; {} facts, {} inferred in total",
                result.new_count,
                result.rounds,
                result.repository.fact_count(),
                result.repository.provenance_count(Provenance::Inferred)
            );
        }
        Command::Check {
            repository,
            close,
            json,
            rules,
        } => {
            let rules = rules.load()?;
            let mut repo = load_repo(&repository)?;
            if close {
                repo = closure(&repo, &rules).repository;
            }
            let findings = check_consistency_with(&repo, &rules);
            let mut entries = Vec::new();
            for finding in &findings {
                let chain = render_derivation(&repo, finding);
                print!("{chain}");
                entries.push(json!({ "fact": finding.key(), "derivation": chain }));
            }
            println!("{} finding(s)", findings.len());
            if let Some(path) = json {
                write(&path, &to_canonical_json(&json!({ "findings": entries })))?;
            }
            return Ok(findings.is_empty());
        }
        Command::Classify {
            vocabulary,
            taxonomy,
            tokens,
            text,
            significance,
            partition_size,
            branch,
            unrestricted,
            json,
        } => {
            let vocab = classifier::vocabulary_from_json(&read(&vocabulary)?)
                .with_context(|| format!("in {}", vocabulary.display()))?;
            let taxonomy = load_taxonomy(&taxonomy)?;
            let tokens = match (tokens, text) {
                (Some(path), _) => classifier::tokens_from_json(&read(&path)?)
                    .with_context(|| format!("in {}", path.display()))?,
                (None, Some(path)) => classifier::tokenize(&read(&path)?),
                (None, None) => unreachable!("clap requires one input"),
            };
            let config = ClassifierConfig {
                significance_level: significance,
                partition_size,
                context_branch: branch.map(Into::into),
                score_mode: if unrestricted { ScoreMode::Unrestricted } else { ScoreMode::Restricted },
            };
            let mut spotted = BTreeSet::new();
            for set in classifier::partition_vocabulary(&vocab, &taxonomy, &config)? {
                spotted.extend(classifier::spot_keywords(&tokens, &set).spotted_set);
            }
            let scores = classifier::classify(&spotted, &vocab, &taxonomy, &config)?;
            println!("spotted: {}", spotted.iter().cloned().collect::<Vec<_>>().join(", "));
            for (node, score) in &scores {
                println!("{node}\t{score:.4}");
            }
            if let Some(path) = json {
                let nodes: Vec<Value> = scores
                    .iter()
                    .map(|(node, score)| json!({ "node": node, "score": score }))
                    .collect();
                write(&path, &to_canonical_json(&json!({ "spotted": spotted, "nodes": nodes })))?;
            }
        }
        Command::Segment {
            envelope,
            triggers,
            window,
            min_pause,
        } => {
            let env: LoudnessEnvelope<f64> = load_json(&envelope)?;
            let triggers: Vec<TriggerEvent<f64>> = load_json(&triggers)?;
            let config = SegmenterConfig {
                window,
                min_pause,
                ..SegmenterConfig::default()
            };
            for s in segment(&env, &triggers, &config)? {
                let trigger = s.trigger.map_or_else(|| "-".to_owned(), |t| t.to_string());
                println!("{:.3} {:.3} {trigger}", s.start, s.end);
            }
        }
        Command::Query { store, query, context } => {
            let store = StatementStore::from_json(&read(&store)?).with_context(|| format!("in {}", store.display()))?;
            match (query, context) {
                (Some(path), _) => {
                    let query = parse_query(&read(&path)?).with_context(|| format!("in {}", path.display()))?;
                    let answers = evaluate(&store, &query);
                    println!("{}", answers.vars.iter().map(|v| format!("?{v}")).collect::<Vec<_>>().join("\t"));
                    let mut lines: Vec<String> = answers
                        .rows
                        .iter()
                        .map(|row| {
                            row.iter()
                                .map(|t| render_term(t, store.prefixes()))
                                .collect::<Vec<_>>()
                                .join("\t")
                        })
                        .collect();
                    lines.sort();
                    for line in lines {
                        println!("{line}");
                    }
                }
                (None, Some(path)) => {
                    let context = LinkContextDef::from_json(&read(&path)?)
                        .with_context(|| format!("in {}", path.display()))?;
                    let selection = select_links(&store, &context)?;
                    for warning in &selection.warnings {
                        eprintln!("warning: {warning}");
                    }
                    println!("link\tfrom\tarcrole\tto");
                    let iri = |s: &str| render_term(&semnet::store::Term::Iri(s.to_owned()), store.prefixes());
                    for link in &selection.links {
                        println!("{}\t{}\t{}\t{}", iri(&link.id), iri(&link.from), iri(&link.arcrole), iri(&link.to));
                    }
                }
                (None, None) => unreachable!("clap requires one input"),
            }
        }
        Command::Experiment { fixture, report, rules } => {
            let rules = rules.load()?;
            let staged = StagedFixture::from_json(&read(&fixture)?).with_context(|| format!("in {}", fixture.display()))?;
            let outcome = run_experiment(&staged, &rules)?;
            print!("{}", report_text(&outcome));
            if let Some(path) = report {
                write(&path, &to_canonical_json(&report_json(&outcome, &staged, &rules)))?;
            }
        }
        Command::ExportDot {
            repository,
            output,
            all_directions,
            no_incorrect,
        } => {
            let repo = load_repo(&repository)?;
            let dot = export_dot(
                &repo,
                DotOptions {
                    dedup_inverse: !all_directions,
                    include_incorrect: !no_incorrect,
                },
            );
            match output {
                Some(path) => write(&path, &dot)?,
                None => print!("{dot}"),
            }
        }
        Command::Rules { dump, validate } => {
            if dump {
                print!("{DEFAULT_RULES}");
            } else if let Some(path) = validate {
                let rules = RuleSet::parse(&read(&path)?).with_context(|| format!("in {}", path.display()))?;
                println!("{} rules (structural rules included)", rules.len());
                for rule in rules.rules() {
                    println!("{rule}");
                }
            } else {
                bail!("nothing to do");
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(error) => {
            eprintln!("error: {error:#}");
            ExitCode::from(1)
        }
    }
}
