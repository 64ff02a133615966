use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context as _};
use crednet::centrality::{write_scores_csv, Algorithm, NetworkKind};
use crednet::embedding::{
    pca_project_2d, write_embedding, write_node_index, write_pca_csv, PcaRow,
};
use crednet::eval::{
    generate_synthetic, run_algorithm, run_benchmark, write_reports_csv, write_reports_json,
    Dataset, ReportStatus,
};
use crednet::ingest::{
    apply_activity_filters, label_accounts, parse_posts, read_credibilities, score_accounts,
    write_credibilities, write_posts, DomainMap, ParseOptions, PlatformBlocklist, RatingTable,
};
use crednet::networks::{
    core_numbers, disparity_backbone, k_core, write_edges_csv, write_nodes_csv, Network,
    NodeAttributes, PRESET_BACKBONE_SIGNIFICANCE, PRESET_BIPARTITE_CORE, PRESET_RESHARE_CORE,
};
use crednet::{AccountCredibility, CredibilityLabel, Error};
use log::{info, warn};
use serde::Serialize;

use crate::config::RunConfig;
use crate::manifest::{self, FileDigest, RunRecord};
use crate::{
    BuildArgs, DataArgs, EmbedArgs, EvaluateArgs, GlobalArgs, IngestArgs, RankArgs, SynthArgs,
};

pub struct Context {
    pub cfg: RunConfig,
    pub out_dir: PathBuf,
    pub deterministic: bool,
    pub threads: Option<usize>,
}

impl Context {
    pub fn new(global: &GlobalArgs) -> anyhow::Result<Self> {
        let mut cfg =
            RunConfig::load(global.config.as_deref(), &global.overrides)?.finalize(global.seed)?;
        if let Some(n) = global.threads {
            if n == 0 {
                return Err(Error::config("--threads must be at least 1").into());
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()?;
            cfg.node2vec.workers = n;
        }
        if global.deterministic {
            cfg.node2vec.workers = 1;
        }
        fs::create_dir_all(&global.out_dir)
            .with_context(|| format!("creating output directory {}", global.out_dir.display()))?;
        Ok(Context {
            cfg,
            out_dir: global.out_dir.clone(),
            deterministic: global.deterministic,
            threads: global.threads,
        })
    }

    fn out(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    fn record<A: Serialize>(
        &self,
        key: &str,
        args: &A,
        inputs: &[&Path],
        outputs: &[&Path],
    ) -> anyhow::Result<()> {
        let digest = |ps: &[&Path]| {
            ps.iter()
                .map(|p| FileDigest::of(p))
                .collect::<anyhow::Result<Vec<_>>>()
        };
        let run = RunRecord {
            command: key.split(' ').next().unwrap_or(key).to_string(),
            arguments: serde_json::to_value(args)?,
            config: serde_json::to_value(&self.cfg)?,
            deterministic: self.deterministic,
            threads: self.threads,
            inputs: digest(inputs)?,
            outputs: digest(outputs)?,
        };
        let path = manifest::record(&self.out_dir, key, run)?;
        info!("wrote {}", path.display());
        Ok(())
    }
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn open(path: &Path) -> anyhow::Result<BufReader<File>> {
    let f = File::open(path)
        .map_err(Error::from)
        .with_context(|| format!("opening {}", path.display()))?;
    Ok(BufReader::new(f))
}

fn pick(
    flag: &Option<PathBuf>,
    configured: &Option<PathBuf>,
    what: &str,
    fallback: Option<PathBuf>,
) -> anyhow::Result<PathBuf> {
    flag.clone()
        .or_else(|| configured.clone())
        .or(fallback)
        .ok_or_else(|| {
            Error::config(format!(
                "no {what} file; pass --{what} or set inputs.{what}"
            ))
            .into()
        })
}

pub fn ingest(ctx: &Context, args: &IngestArgs) -> anyhow::Result<()> {
    let inputs = &ctx.cfg.inputs;
    let posts_path = pick(&args.posts, &inputs.posts, "posts", None)?;
    let ratings_path = pick(&args.ratings, &inputs.ratings, "ratings", None)?;
    let map_path = args
        .domain_map
        .clone()
        .or_else(|| inputs.domain_map.clone());

    let blocklist = match &inputs.platform_domains {
        Some(ds) => PlatformBlocklist::new(ds),
        None => PlatformBlocklist::default(),
    };
    let domain_map = match &map_path {
        Some(p) => Some(
            DomainMap::from_csv(open(p)?).with_context(|| format!("reading {}", p.display()))?,
        ),
        None => None,
    };
    let parsed = parse_posts(
        open(&posts_path)?,
        &ParseOptions {
            blocklist,
            domain_map,
        },
    )
    .with_context(|| format!("reading {}", posts_path.display()))?;
    info!(
        "parsed {} records; skipped {} malformed, {} without account, {} without domains",
        parsed.records.len(),
        parsed.malformed,
        parsed.missing_account,
        parsed.no_domains
    );
    let ratings = RatingTable::from_csv(open(&ratings_path)?)
        .with_context(|| format!("reading {}", ratings_path.display()))?;

    let records = apply_activity_filters(&parsed.records, ctx.cfg.filters);
    info!("{} records remain after activity filters", records.len());
    let (creds, labels) = label_accounts(&score_accounts(&records, &ratings), ctx.cfg.labeling)?;
    info!(
        "{} accounts; {} high and {} low labeled",
        creds.len(),
        labels.high.len(),
        labels.low.len()
    );

    let records_out = ctx.out("records.jsonl");
    let creds_out = ctx.out("credibilities.csv");
    let mut w = create(&records_out)?;
    write_posts(&mut w, &records)?;
    w.flush()?;
    let mut w = create(&creds_out)?;
    write_credibilities(&mut w, &creds)?;
    w.flush()?;

    let mut ins = vec![posts_path.as_path(), ratings_path.as_path()];
    if let Some(p) = &map_path {
        ins.push(p);
    }
    ctx.record("ingest", args, &ins, &[&records_out, &creds_out])
}

struct Loaded {
    data: Dataset,
    creds: BTreeMap<String, AccountCredibility>,
    records_path: PathBuf,
    creds_path: PathBuf,
}

impl Loaded {
    fn inputs(&self) -> [&Path; 2] {
        [&self.records_path, &self.creds_path]
    }

    fn score(&self, id: &str) -> Option<f64> {
        self.creds.get(id).and_then(|c| c.score)
    }

    fn label(&self, id: &str) -> Option<CredibilityLabel> {
        self.creds.get(id).and_then(|c| c.label)
    }
}

fn load(ctx: &Context, args: &DataArgs) -> anyhow::Result<Loaded> {
    let inputs = &ctx.cfg.inputs;
    let records_path = pick(
        &args.records,
        &inputs.records,
        "records",
        Some(ctx.out("records.jsonl")),
    )?;
    let creds_path = pick(
        &args.credibilities,
        &inputs.credibilities,
        "credibilities",
        Some(ctx.out("credibilities.csv")),
    )?;

    let opts = ParseOptions {
        blocklist: PlatformBlocklist::empty(),
        domain_map: None,
    };
    let parsed = parse_posts(open(&records_path)?, &opts)
        .with_context(|| format!("reading {}", records_path.display()))?;
    if parsed.skipped() > 0 {
        warn!(
            "{} unusable lines in {}",
            parsed.skipped(),
            records_path.display()
        );
    }
    let raw = read_credibilities(open(&creds_path)?)
        .with_context(|| format!("reading {}", creds_path.display()))?;
    let (creds, labels) = label_accounts(&raw, ctx.cfg.labeling)?;
    let data = Dataset::new(parsed.records, labels);
    let creds = creds
        .into_iter()
        .map(|c| (c.account_id.clone(), c))
        .collect();
    Ok(Loaded {
        data,
        creds,
        records_path,
        creds_path,
    })
}

fn export<G: Network>(
    g: &G,
    k: Option<usize>,
    significance: Option<f64>,
    attrs: impl Fn(&str) -> (Option<f64>, Option<CredibilityLabel>),
    edges_out: &Path,
    nodes_out: &Path,
) -> anyhow::Result<()> {
    let cored;
    let g = match k {
        Some(k) => {
            cored = k_core(g, k)?;
            info!(
                "{k}-core keeps {} of {} nodes",
                cored.node_count(),
                g.node_count()
            );
            &cored
        }
        None => g,
    };
    let backbone;
    let g = match significance {
        Some(s) => {
            backbone = disparity_backbone(g, s)?;
            info!(
                "backbone keeps {} of {} edges",
                backbone.edge_list().len(),
                g.edge_list().len()
            );
            &backbone
        }
        None => g,
    };
    let mut w = create(edges_out)?;
    write_edges_csv(&mut w, g)?;
    w.flush()?;

    let rows: Vec<NodeAttributes> = g
        .nodes()
        .ids()
        .iter()
        .zip(core_numbers(g))
        .map(|(id, core_number)| {
            let (score, label) = attrs(id);
            NodeAttributes {
                node: id.clone(),
                score,
                label,
                core_number,
            }
        })
        .collect();
    let mut w = create(nodes_out)?;
    write_nodes_csv(&mut w, &rows)?;
    w.flush()?;
    Ok(())
}

pub fn build(ctx: &Context, args: &BuildArgs) -> anyhow::Result<()> {
    let loaded = load(ctx, &args.data)?;
    let data = &loaded.data;
    let net = args.network;
    let preset = if net == NetworkKind::Bipartite {
        PRESET_BIPARTITE_CORE
    } else {
        PRESET_RESHARE_CORE
    };
    let k = args.k_core.map(|k| k.unwrap_or(preset));
    let significance = args
        .backbone
        .map(|s| s.unwrap_or(PRESET_BACKBONE_SIGNIFICANCE));

    let edges_out = ctx.out(&format!("{net}_edges.csv"));
    let nodes_out = ctx.out(&format!("{net}_nodes.csv"));
    let account = |id: &str| (loaded.score(id), loaded.label(id));
    match net {
        NetworkKind::Reshare | NetworkKind::Trust => {
            let g = if net == NetworkKind::Reshare {
                data.reshare()
            } else {
                data.trust()
            };
            if g.edge_count() == 0 {
                return Err(Error::NotApplicable(format!("the {net} network has no edges")).into());
            }
            export(g, k, significance, account, &edges_out, &nodes_out)?;
        }
        NetworkKind::CoShare => export(
            data.coshare(),
            k,
            significance,
            account,
            &edges_out,
            &nodes_out,
        )?,
        NetworkKind::Bipartite => {
            let attrs = |id: &str| match id.strip_prefix("account:") {
                Some(a) => account(a),
                None => (None, None),
            };
            export(
                &data.bipartite().to_undirected(),
                k,
                significance,
                attrs,
                &edges_out,
                &nodes_out,
            )?;
        }
    }
    // Record the preset values a bare flag resolved to.
    let resolved = serde_json::json!({
        "network": net,
        "k_core": k,
        "backbone": significance,
        "data": args.data,
    });
    ctx.record(
        &format!("build {net}"),
        &resolved,
        &loaded.inputs(),
        &[&edges_out, &nodes_out],
    )
}

pub fn rank(ctx: &Context, args: &RankArgs) -> anyhow::Result<()> {
    let loaded = load(ctx, &args.data)?;
    let data = &loaded.data;
    let alg = args.algorithm;
    let result = run_algorithm(data, alg, data.labels(), &ctx.cfg.benchmark(), None)?;
    if !result.scores.converged {
        warn!(
            "{alg} stopped after {} iterations without converging",
            result.scores.iterations
        );
    }
    let out = ctx.out(&format!("scores_{alg}.csv"));
    let mut w = create(&out)?;
    write_scores_csv(&mut w, &result.accounts, &result.scores)?;
    w.flush()?;
    info!("scored {} accounts with {alg}", result.accounts.len());
    ctx.record(&format!("rank {alg}"), args, &loaded.inputs(), &[&out])
}

pub fn embed(ctx: &Context, args: &EmbedArgs) -> anyhow::Result<()> {
    let alg = match args.network {
        NetworkKind::Reshare => Algorithm::Node2vecReshare,
        NetworkKind::CoShare => Algorithm::Node2vecCoShare,
        other => {
            return Err(Error::config(format!(
                "embeddings are trained on reshare or coshare, not {other}"
            ))
            .into())
        }
    };
    let loaded = load(ctx, &args.data)?;
    let emb = crednet::eval::embed_network(&loaded.data, alg, &ctx.cfg.node2vec)?;
    let projection = pca_project_2d(&emb)?;
    let total = projection.total_variance;
    if total > 0.0 {
        let [a, b] = projection.explained_variance;
        info!(
            "first two components explain {:.1}% of variance",
            100.0 * (a + b) / total
        );
    }

    let net = args.network;
    let bin_out = ctx.out(&format!("embedding_{net}.bin"));
    let index_out = ctx.out(&format!("embedding_{net}_nodes.csv"));
    let pca_out = ctx.out(&format!("pca_{net}.csv"));
    let mut w = create(&bin_out)?;
    write_embedding(&mut w, &emb)?;
    w.flush()?;
    let mut w = create(&index_out)?;
    write_node_index(&mut w, emb.nodes())?;
    w.flush()?;
    let rows: Vec<PcaRow> = emb
        .nodes()
        .ids()
        .iter()
        .zip(&projection.coords)
        .map(|(id, &[x, y])| PcaRow {
            node: id.clone(),
            x,
            y,
            score: loaded.score(id),
            label: loaded.label(id).map(|l| l.to_string()),
        })
        .collect();
    let mut w = create(&pca_out)?;
    write_pca_csv(&mut w, &rows)?;
    w.flush()?;
    ctx.record(
        &format!("embed {net}"),
        args,
        &loaded.inputs(),
        &[&bin_out, &index_out, &pca_out],
    )
}

fn parse_algorithms(spec: &str) -> crednet::Result<Vec<Algorithm>> {
    if spec.trim().eq_ignore_ascii_case("all") {
        return Ok(Algorithm::ALL.to_vec());
    }
    let mut algs: Vec<Algorithm> = spec
        .split(',')
        .map(str::parse)
        .collect::<crednet::Result<_>>()?;
    algs.dedup();
    if algs.is_empty() {
        return Err(Error::config("no algorithms selected"));
    }
    Ok(algs)
}

pub fn evaluate(ctx: &Context, args: &EvaluateArgs) -> anyhow::Result<()> {
    let algs = match &args.algorithms {
        Some(spec) => parse_algorithms(spec)?,
        None => ctx.cfg.evaluation.algorithms.clone(),
    };
    let loaded = load(ctx, &args.data)?;
    let reports = run_benchmark(&loaded.data, &algs, &ctx.cfg.benchmark(), ctx.cfg.seed)?;

    let json_out = ctx.out("report.json");
    let csv_out = ctx.out("report.csv");
    let mut w = create(&json_out)?;
    write_reports_json(&mut w, &reports)?;
    w.flush()?;
    let mut w = create(&csv_out)?;
    write_reports_csv(&mut w, &reports)?;
    w.flush()?;

    let fmt = |m: Option<f64>, s: Option<f64>| match (m, s) {
        (Some(m), Some(s)) => format!("{m:.3} ± {s:.3}"),
        (Some(m), None) => format!("{m:.3}"),
        _ => "-".into(),
    };
    println!(
        "{:<20} {:<10} {:<16} {:<16}",
        "algorithm", "network", "auc", "f1"
    );
    for r in &reports {
        match r.status {
            ReportStatus::Ok => println!(
                "{:<20} {:<10} {:<16} {:<16}",
                r.algorithm.name(),
                r.network.name(),
                fmt(r.mean_auc, r.std_auc),
                fmt(r.mean_f1, r.std_f1)
            ),
            ReportStatus::NotApplicable => println!(
                "{:<20} {:<10} N/A ({})",
                r.algorithm.name(),
                r.network.name(),
                r.reason.as_deref().unwrap_or("not applicable")
            ),
        }
    }
    ctx.record("evaluate", args, &loaded.inputs(), &[&json_out, &csv_out])
}

pub fn synth(ctx: &Context, args: &SynthArgs) -> anyhow::Result<()> {
    let mut cfg = ctx.cfg.synthetic;
    if let Some(mu) = args.mu {
        cfg.mu = mu;
    }
    let data = generate_synthetic(&cfg)?;
    let ratings = RatingTable::new(data.ratings).map_err(|e| anyhow!(e))?;

    let posts_out = ctx.out("posts.jsonl");
    let ratings_out = ctx.out("ratings.csv");
    let truth_out = ctx.out("truth.csv");
    let mut w = create(&posts_out)?;
    write_posts(&mut w, &data.posts)?;
    w.flush()?;
    let mut w = create(&ratings_out)?;
    ratings.write_csv(&mut w)?;
    w.flush()?;
    let mut truth = csv::Writer::from_writer(create(&truth_out)?);
    truth.write_record(["account_id", "label"])?;
    let labeled = data
        .truth
        .high
        .iter()
        .map(|a| (a, "high"))
        .chain(data.truth.low.iter().map(|a| (a, "low")));
    let mut labeled: Vec<_> = labeled.collect();
    labeled.sort();
    for (a, l) in labeled {
        truth.write_record([a.as_str(), l])?;
    }
    truth.flush()?;
    info!(
        "{} posts from {} accounts",
        data.posts.len(),
        data.truth.len()
    );
    ctx.record("synth", args, &[], &[&posts_out, &ratings_out, &truth_out])
}
