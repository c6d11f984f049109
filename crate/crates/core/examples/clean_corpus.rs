//! Cleans, segments and deduplicates a handful of crawled pages.
//!
//! Run with `cargo run --example clean_corpus`.

use skbench::corpus::{clean_and_segment, dedup, CleanStep, DedupConfig, RawDocument};

fn main() -> skbench::Result<()> {
    let pages = [
        ("Počasie na víkend", "Zajtra bude pršať!!! Viac info na https://meteo.sk/dnes. {reklama} Pozor na búrky."),
        ("Šport", "**Slovan** vyhral 2:1... Zajtra bude pršať!!! Tréner bol spokojný."),
        ("", "Píšte na redakcia@noviny.sk -- odpovieme do 31. 12. 2024."),
    ];
    let docs: Vec<RawDocument> = pages
        .iter()
        .enumerate()
        .map(|(i, (title, body))| RawDocument { title: title.to_string(), body: body.to_string(), source_id: format!("page-{i}") })
        .collect();

    let (sentences, stats) = clean_and_segment(&docs, &CleanStep::ALL, None, 2)?;
    println!("{} documents -> {} sentences", stats.documents, stats.sentences_total);

    // 4 shards on 2 workers; any layout gives the same output
    let unique = dedup(&sentences, &DedupConfig { shards: 4, ..DedupConfig::default() }.with_jobs(2))?;
    for s in &unique.sentences {
        println!("  {s}");
    }
    println!("{} unique of {}", unique.unique_count, unique.total_count);
    Ok(())
}
