//! Exact sentence deduplication with hash sharding.
//!
//! Sentences are routed to shards by a 128-bit hash of their bytes, each
//! shard is deduplicated independently (in parallel), and the surviving
//! first occurrences are merged back by their original position. Equal
//! hashes are always confirmed by comparing bytes. With a spill directory
//! the shards live on disk, so only one shard per worker is held in memory.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, ErrorKind, Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use xxhash_rust::xxh3::xxh3_128;

use crate::error::{Error, Result};

/// Sentences kept after deduplication, with the counts the run observed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceStream {
    pub sentences: Vec<String>,
    pub total_count: u64,
    pub unique_count: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DedupCounts {
    pub total_count: u64,
    pub unique_count: u64,
}

#[derive(Debug, Clone)]
pub struct DedupConfig {
    pub shards: usize,
    pub jobs: usize,
    pub spill_dir: Option<PathBuf>,
}

impl Default for DedupConfig {
    fn default() -> Self {
        Self {
            shards: 64,
            jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
            spill_dir: None,
        }
    }
}

impl DedupConfig {
    pub fn with_jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs;
        self
    }

    pub fn with_spill_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.spill_dir = Some(dir.into());
        self
    }
}

struct Entry {
    index: u64,
    hash: u128,
    text: Vec<u8>,
}

type Kept = (u64, Vec<u8>);

const HASH_CHUNK: usize = 1 << 14;

/// Deduplicates an in-memory sentence list, keeping first occurrences.
pub fn dedup<S: AsRef<str>>(sentences: &[S], config: &DedupConfig) -> Result<SentenceStream> {
    let mut out = Vec::new();
    let counts = dedup_stream(
        sentences.iter().map(|s| Ok(s.as_ref().to_owned())),
        config,
        |text| {
            out.push(String::from_utf8(text.to_vec()).expect("input was UTF-8"));
            Ok(())
        },
    )?;
    Ok(SentenceStream {
        sentences: out,
        total_count: counts.total_count,
        unique_count: counts.unique_count,
    })
}

/// Streams unique sentences to `out`, one per line.
pub fn dedup_to_writer<I, W>(sentences: I, config: &DedupConfig, mut out: W) -> Result<DedupCounts>
where
    I: IntoIterator<Item = Result<String>>,
    W: Write,
{
    let counts = dedup_stream(sentences, config, |text| {
        out.write_all(text)?;
        out.write_all(b"\n")?;
        Ok(())
    })?;
    out.flush()?;
    Ok(counts)
}

/// Core driver: partitions, deduplicates shards and emits survivors in
/// original order through `emit`.
pub fn dedup_stream<I, F>(sentences: I, config: &DedupConfig, mut emit: F) -> Result<DedupCounts>
where
    I: IntoIterator<Item = Result<String>>,
    F: FnMut(&[u8]) -> Result<()>,
{
    if config.shards == 0 {
        return Err(Error::Config("shard count must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;

    let mut store = ShardStore::new(config)?;
    let mut total = 0u64;
    let mut chunk: Vec<String> = Vec::with_capacity(HASH_CHUNK);
    let flush = |chunk: &mut Vec<String>, total: &mut u64, store: &mut ShardStore| -> Result<()> {
        let hashes: Vec<u128> =
            pool.install(|| chunk.par_iter().map(|s| xxh3_128(s.as_bytes())).collect());
        for (text, hash) in chunk.drain(..).zip(hashes) {
            store.push(Entry {
                index: *total,
                hash,
                text: text.into_bytes(),
            })?;
            *total += 1;
        }
        Ok(())
    };
    for sentence in sentences {
        chunk.push(sentence?);
        if chunk.len() == HASH_CHUNK {
            flush(&mut chunk, &mut total, &mut store)?;
        }
    }
    flush(&mut chunk, &mut total, &mut store)?;

    let mut unique = 0u64;
    match store {
        ShardStore::Memory(shards) => {
            let kept: Vec<Vec<Kept>> =
                pool.install(|| shards.into_par_iter().map(|s| dedup_shard(s.into_iter().map(Ok))).collect::<Result<_>>())?;
            merge(kept.into_iter().map(|v| v.into_iter().map(Ok)), |text| {
                unique += 1;
                emit(text)
            })?;
        }
        ShardStore::Disk { dir, writers } => {
            let inputs: Vec<PathBuf> = (0..writers.len()).map(|k| shard_path(&dir, "shard", k)).collect();
            for w in writers {
                w.into_inner()
                    .map_err(|e| Error::io(&dir, e.into_error()))?
                    .sync_all()
                    .map_err(|e| Error::io(&dir, e))?;
            }
            let outputs: Vec<PathBuf> = pool.install(|| {
                inputs
                    .par_iter()
                    .enumerate()
                    .map(|(k, path)| {
                        let kept = dedup_shard(RecordReader::open(path)?.map(|r| {
                            r.map(|(index, hash, text)| Entry { index, hash, text })
                        }))?;
                        let out = shard_path(&dir, "kept", k);
                        let mut w = BufWriter::new(File::create(&out).map_err(|e| Error::io(&out, e))?);
                        for (index, text) in &kept {
                            write_record(&mut w, *index, 0, text).map_err(|e| Error::io(&out, e))?;
                        }
                        w.flush().map_err(|e| Error::io(&out, e))?;
                        fs::remove_file(path).map_err(|e| Error::io(path, e))?;
                        Ok(out)
                    })
                    .collect::<Result<_>>()
            })?;
            let readers = outputs
                .iter()
                .map(|p| RecordReader::open(p).map(|r| r.map(|res| res.map(|(i, _, t)| (i, t)))))
                .collect::<Result<Vec<_>>>()?;
            merge(readers, |text| {
                unique += 1;
                emit(text)
            })?;
            for p in &outputs {
                fs::remove_file(p).map_err(|e| Error::io(p, e))?;
            }
        }
    }
    Ok(DedupCounts {
        total_count: total,
        unique_count: unique,
    })
}

enum ShardStore {
    Memory(Vec<Vec<Entry>>),
    Disk { dir: PathBuf, writers: Vec<BufWriter<File>> },
}

impl ShardStore {
    fn new(config: &DedupConfig) -> Result<Self> {
        match &config.spill_dir {
            None => Ok(ShardStore::Memory((0..config.shards).map(|_| Vec::new()).collect())),
            Some(dir) => {
                fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
                let writers = (0..config.shards)
                    .map(|k| {
                        let path = shard_path(dir, "shard", k);
                        File::create(&path)
                            .map(BufWriter::new)
                            .map_err(|e| Error::io(&path, e))
                    })
                    .collect::<Result<_>>()?;
                Ok(ShardStore::Disk {
                    dir: dir.clone(),
                    writers,
                })
            }
        }
    }

    fn push(&mut self, entry: Entry) -> Result<()> {
        match self {
            ShardStore::Memory(shards) => {
                let k = shard_of(entry.hash, shards.len());
                shards[k].push(entry);
                Ok(())
            }
            ShardStore::Disk { dir, writers } => {
                let k = shard_of(entry.hash, writers.len());
                write_record(&mut writers[k], entry.index, entry.hash, &entry.text)
                    .map_err(|e| Error::io(shard_path(dir, "shard", k), e))
            }
        }
    }
}

fn shard_of(hash: u128, shards: usize) -> usize {
    ((hash >> 64) as u64 % shards as u64) as usize
}

fn shard_path(dir: &Path, kind: &str, k: usize) -> PathBuf {
    dir.join(format!("{kind}-{k:05}.bin"))
}

/// Keeps the first occurrence of every distinct byte string in one shard.
/// Entries arrive in ascending index order.
fn dedup_shard<I>(entries: I) -> Result<Vec<Kept>>
where
    I: Iterator<Item = Result<Entry>>,
{
    let mut seen: HashMap<u128, Vec<usize>> = HashMap::new();
    let mut kept: Vec<Kept> = Vec::new();
    for entry in entries {
        let entry = entry?;
        let slots = seen.entry(entry.hash).or_default();
        if slots.iter().any(|&i| kept[i].1 == entry.text) {
            continue;
        }
        slots.push(kept.len());
        kept.push((entry.index, entry.text));
    }
    Ok(kept)
}

/// K-way merge of per-shard survivor lists by original index.
fn merge<S, F>(shards: impl IntoIterator<Item = S>, mut emit: F) -> Result<()>
where
    S: Iterator<Item = Result<Kept>>,
    F: FnMut(&[u8]) -> Result<()>,
{
    let mut sources: Vec<S> = shards.into_iter().collect();
    let mut heads: Vec<Option<Vec<u8>>> = vec![None; sources.len()];
    let mut heap = BinaryHeap::new();
    for (k, src) in sources.iter_mut().enumerate() {
        if let Some(item) = src.next() {
            let (index, text) = item?;
            heads[k] = Some(text);
            heap.push(Reverse((index, k)));
        }
    }
    while let Some(Reverse((_, k))) = heap.pop() {
        let text = heads[k].take().expect("head present for queued shard");
        emit(&text)?;
        if let Some(item) = sources[k].next() {
            let (index, text) = item?;
            heads[k] = Some(text);
            heap.push(Reverse((index, k)));
        }
    }
    Ok(())
}

fn write_record<W: Write>(w: &mut W, index: u64, hash: u128, text: &[u8]) -> std::io::Result<()> {
    let len = u32::try_from(text.len())
        .map_err(|_| std::io::Error::new(ErrorKind::InvalidInput, "sentence longer than 4 GiB"))?;
    w.write_all(&index.to_le_bytes())?;
    w.write_all(&hash.to_le_bytes())?;
    w.write_all(&len.to_le_bytes())?;
    w.write_all(text)
}

struct RecordReader {
    path: PathBuf,
    inner: BufReader<File>,
}

impl RecordReader {
    fn open(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Ok(Self {
            path: path.to_owned(),
            inner: BufReader::new(file),
        })
    }

    fn read_one(&mut self) -> std::io::Result<Option<(u64, u128, Vec<u8>)>> {
        let mut index = [0u8; 8];
        match self.inner.read_exact(&mut index) {
            Ok(()) => {}
            Err(e) if e.kind() == ErrorKind::UnexpectedEof => return Ok(None),
            Err(e) => return Err(e),
        }
        let mut hash = [0u8; 16];
        self.inner.read_exact(&mut hash)?;
        let mut len = [0u8; 4];
        self.inner.read_exact(&mut len)?;
        let mut text = vec![0u8; u32::from_le_bytes(len) as usize];
        self.inner.read_exact(&mut text)?;
        Ok(Some((u64::from_le_bytes(index), u128::from_le_bytes(hash), text)))
    }
}

impl Iterator for RecordReader {
    type Item = Result<(u64, u128, Vec<u8>)>;

    fn next(&mut self) -> Option<Self::Item> {
        self.read_one()
            .map_err(|e| Error::io(&self.path, e))
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;

    fn run(input: &[&str]) -> SentenceStream {
        dedup(input, &DedupConfig::default().with_jobs(2)).unwrap()
    }

    #[test]
    fn keeps_first_occurrence() {
        let s = run(&["a", "b", "a"]);
        assert_eq!(s.sentences, ["a", "b"]);
        assert_eq!((s.total_count, s.unique_count), (3, 2));
    }

    #[test]
    fn empty_input() {
        let s = run(&[]);
        assert!(s.sentences.is_empty());
        assert_eq!((s.total_count, s.unique_count), (0, 0));
    }

    #[test]
    fn single_shard_and_spill_agree() {
        let input: Vec<String> = (0..5000).map(|i| format!("veta {}", i % 1234)).collect();
        let mem = dedup(&input, &DedupConfig { shards: 1, jobs: 1, spill_dir: None }).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let disk = dedup(&input, &DedupConfig::default().with_jobs(3).with_spill_dir(dir.path())).unwrap();
        assert_eq!(mem, disk);
        assert_eq!(mem.unique_count, 1234);
        let oracle: Vec<&String> = {
            let mut seen = HashSet::new();
            input.iter().filter(|s| seen.insert(*s)).collect()
        };
        assert_eq!(mem.sentences.iter().collect::<Vec<_>>(), oracle);
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
    }

    #[test]
    fn equal_hash_requires_equal_bytes() {
        // forced collisions: every entry carries the same hash
        let entries = ["x", "y", "x", "z", "y"]
            .iter()
            .enumerate()
            .map(|(i, t)| Ok(Entry { index: i as u64, hash: 7, text: t.as_bytes().to_vec() }));
        let kept = dedup_shard(entries).unwrap();
        let texts: Vec<&[u8]> = kept.iter().map(|(_, t)| t.as_slice()).collect();
        assert_eq!(texts, [b"x".as_slice(), b"y", b"z"]);
    }

    #[test]
    fn spill_error_is_reported() {
        let file = tempfile::NamedTempFile::new().unwrap();
        // a regular file cannot be used as the spill directory
        let err = dedup(&["a"], &DedupConfig::default().with_spill_dir(file.path())).unwrap_err();
        assert!(matches!(err, Error::Io { .. }), "{err}");
    }

    #[test]
    fn writer_output() {
        let mut out = Vec::new();
        let counts = dedup_to_writer(
            ["b", "a", "b"].iter().map(|s| Ok(s.to_string())),
            &DedupConfig::default(),
            &mut out,
        )
        .unwrap();
        assert_eq!(out, b"b\na\n");
        assert_eq!(counts, DedupCounts { total_count: 3, unique_count: 2 });
    }
}
