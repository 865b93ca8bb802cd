mod args;

use std::fs::File;
use std::io::{self, BufRead, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;
use vnspam_core::eval::{comparison_grid, render_table, write_csv, GridEntry};
use vnspam_core::preprocess::{tokenize, Segmenter};
use vnspam_core::synth::{synthetic_corpus, SynthConfig};
use vnspam_core::{
    load_corpus, model_file, normalize_text, run_grid, stratified_kfold, Corpus, FittedPipeline,
    Label, PipelineConfig,
};

use args::{Cli, Command, PipelineArgs, PreprocessArgs};

/// Exit statuses besides 0 and the generic 1.
const EXIT_MODEL: u8 = 2;
const EXIT_BAD_INPUT: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Train {
            corpus,
            output,
            pipeline,
        } => train(&corpus, &output, &pipeline),
        Command::Predict { model } => predict(&model),
        Command::Evaluate {
            corpus,
            grid,
            folds,
            csv,
            jobs,
            pipeline,
        } => evaluate(&corpus, &grid, folds, csv.as_deref(), jobs, &pipeline),
        Command::Tokenize {
            corpus,
            show_merges,
            preprocess,
        } => tokenize_corpus(&corpus, show_merges, &preprocess),
        Command::Synth {
            messages,
            spam_fraction,
            tagged_fraction,
            seed,
        } => synth(SynthConfig {
            messages,
            spam_fraction,
            tagged_fraction,
            seed,
            ..SynthConfig::default()
        }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn labelled(corpus: &Corpus) -> Result<(Vec<&str>, Vec<Label>)> {
    let mut texts = Vec::with_capacity(corpus.len());
    let mut labels = Vec::with_capacity(corpus.len());
    for m in corpus.messages() {
        let label = m
            .label
            .with_context(|| format!("message {} has no label", m.id))?;
        texts.push(m.text.as_str());
        labels.push(label);
    }
    Ok((texts, labels))
}

fn train(corpus_path: &Path, output: &Path, args: &PipelineArgs) -> Result<ExitCode> {
    let config = args.config();
    config.validate()?;
    let rules = args.preprocess.rules()?;
    let corpus = load_corpus(corpus_path)?;
    let (texts, labels) = labelled(&corpus)?;
    let (pipeline, summary) = FittedPipeline::fit_with_summary(&config, &rules, &texts, &labels)?;
    model_file::save(&pipeline, output)?;

    let counts = corpus.counts();
    println!("configuration   {config}");
    println!(
        "messages        {} ({} spam, {} ham)",
        summary.messages, counts.spam, counts.legitimate
    );
    if pipeline.vocabulary.is_some() {
        println!("vocabulary      {} raw tokens", summary.raw_vocabulary);
        println!(
            "                {} after preprocessing",
            summary.preprocessed_vocabulary
        );
        println!(
            "                {} with document frequency >= {}",
            summary.selected_vocabulary, config.min_df
        );
        let merges: usize = pipeline
            .segmenter
            .passes()
            .iter()
            .map(|p| p.num_merges())
            .sum();
        println!("collocations    {merges}");
    }
    println!("model written   {}", output.display());
    Ok(ExitCode::SUCCESS)
}

fn predict(model_path: &Path) -> Result<ExitCode> {
    let pipeline = match model_file::load(model_path) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot use model {}: {e}", model_path.display());
            return Ok(ExitCode::from(EXIT_MODEL));
        }
    };
    let stdin = io::stdin().lock();
    let mut out = BufWriter::new(io::stdout().lock());
    let mut bad_lines = 0usize;
    for (n, line) in stdin.split(b'\n').enumerate() {
        let bytes = line.context("reading standard input")?;
        let bytes = bytes.strip_suffix(b"\r").unwrap_or(&bytes);
        match std::str::from_utf8(bytes) {
            Ok(text) => {
                let p = pipeline.predict(text)?;
                writeln!(out, "{}\t{:?}", p.label, p.score)?;
            }
            Err(_) => {
                bad_lines += 1;
                eprintln!("line {}: invalid UTF-8", n + 1);
                writeln!(out, "ERR")?;
            }
        }
    }
    out.flush()?;
    Ok(if bad_lines > 0 {
        ExitCode::from(EXIT_BAD_INPUT)
    } else {
        ExitCode::SUCCESS
    })
}

fn select_grid(spec: &str, base: &PipelineConfig) -> Result<Vec<GridEntry>> {
    let all = comparison_grid(base);
    match spec.trim() {
        "single" => Ok(vec![GridEntry::new(base.to_string(), base.clone())]),
        "paper" => Ok(all),
        "" => Ok(Vec::new()),
        names => names
            .split(',')
            .map(|name| {
                let name = name.trim();
                all.iter()
                    .find(|e| e.name == name)
                    .cloned()
                    .with_context(|| {
                        let known: Vec<&str> = all.iter().map(|e| e.name.as_str()).collect();
                        format!("unknown grid entry `{name}` (known: {})", known.join(", "))
                    })
            })
            .collect(),
    }
}

fn evaluate(
    corpus_path: &Path,
    grid: &str,
    folds: usize,
    csv: Option<&Path>,
    jobs: usize,
    args: &PipelineArgs,
) -> Result<ExitCode> {
    if folds < 2 {
        bail!("--folds must be at least 2, got {folds}");
    }
    if jobs == 0 {
        bail!("--jobs must be at least 1");
    }
    let base = args.config();
    base.validate()?;
    let grid = select_grid(grid, &base)?;
    let rules = args.preprocess.rules()?;
    let corpus = load_corpus(corpus_path)?;
    let assignment = stratified_kfold(&corpus, folds, args.seed)?;
    let reports = run_grid(&corpus, &assignment, &grid, &rules, jobs)?;

    let counts = corpus.counts();
    println!(
        "{} messages ({} spam, {} ham), {folds}-fold stratified, seed {}",
        corpus.len(),
        counts.spam,
        counts.legitimate,
        args.seed
    );
    println!("rates are per-fold averages; spam is the positive class\n");
    print!("{}", render_table(&reports));
    if let Some(path) = csv {
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = BufWriter::new(file);
        write_csv(&reports, &mut w)?;
        w.flush()?;
    }
    Ok(ExitCode::SUCCESS)
}

fn tokenize_corpus(
    corpus_path: &Path,
    show_merges: bool,
    args: &PreprocessArgs,
) -> Result<ExitCode> {
    let params = args.collocation();
    params.validate()?;
    if args.passes < 1 {
        bail!("--passes must be at least 1");
    }
    let rules = args.rules()?;
    let corpus = load_corpus(corpus_path)?;
    let tagged: Vec<_> = corpus
        .messages()
        .iter()
        .map(|m| tokenize(&normalize_text(&m.text, args.nfc), &rules))
        .collect();
    let segmenter = Segmenter::fit(&tagged, params, args.passes)?;

    let mut out = BufWriter::new(io::stdout().lock());
    if show_merges {
        for (pass, model) in segmenter.passes().iter().enumerate() {
            for m in model.merges() {
                if args.passes > 1 {
                    write!(out, "{}\t", pass + 1)?;
                }
                writeln!(out, "{}\t{}\t{}\t{:?}", m.left, m.right, m.count, m.score)?;
            }
        }
    } else {
        for doc in &tagged {
            writeln!(out, "{}", segmenter.segment(doc))?;
        }
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn synth(cfg: SynthConfig) -> Result<ExitCode> {
    for (name, p) in [("spam", cfg.spam_fraction), ("tagged", cfg.tagged_fraction)] {
        if !(0.0..=1.0).contains(&p) {
            bail!("--{name}-fraction must lie in [0, 1], got {p}");
        }
    }
    let mut out = BufWriter::new(io::stdout().lock());
    synthetic_corpus(&cfg).write_tsv(&mut out)?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}
