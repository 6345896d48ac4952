//! Corpus ingest and serialization (CSV and JSONL).
//!
//! Both formats share one flat schema. The fixed columns, in file order:
//!
//! ```text
//! tweet_id, stratum, sample_kind, primary_label, violent, scam, adult,
//! likes, replies, retweets, quotes, removed, removal_reason, author_id,
//! author_verified, followers, following, tweet_count, is_reply,
//! possibly_sensitive
//! ```
//!
//! followed by zero or more `score:<model_id>` columns (sorted by model id)
//! and an optional trailing `text` column. Missing optional values are
//! encoded as empty CSV fields / JSON nulls. Unrecognised columns and
//! missing required columns are schema errors that name the column; a value
//! that fails to parse or a row that violates a corpus invariant is a
//! row-level error carrying its 1-based row index.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde_json::{Map, Value};

use super::{AnnotatedTweet, Corpus, CorpusSource, Label, RemovalReason, SampleKind};
use crate::error::{Error, Result};
use crate::numfmt::fmt_roundtrip;

/// Fixed (non-score, non-text) columns in file order.
const FIXED_COLUMNS: [&str; 20] = [
    "tweet_id",
    "stratum",
    "sample_kind",
    "primary_label",
    "violent",
    "scam",
    "adult",
    "likes",
    "replies",
    "retweets",
    "quotes",
    "removed",
    "removal_reason",
    "author_id",
    "author_verified",
    "followers",
    "following",
    "tweet_count",
    "is_reply",
    "possibly_sensitive",
];

const SCORE_PREFIX: &str = "score:";

/// On-disk corpus encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    Csv,
    Jsonl,
}

impl CorpusFormat {
    /// Infer the format from a file extension (`.csv` / `.jsonl` / `.ndjson`).
    pub fn infer(path: &Path) -> Result<CorpusFormat> {
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => Ok(CorpusFormat::Csv),
            Some("jsonl") | Some("ndjson") => Ok(CorpusFormat::Jsonl),
            other => Err(Error::invalid(format!(
                "cannot infer corpus format from extension {:?}; pass it explicitly",
                other.unwrap_or("")
            ))),
        }
    }
}

/// Load and validate a corpus file.
///
/// Every row is checked against the corpus invariants as it is read; the
/// first violation aborts the load with a row-level error.
pub fn load_corpus(path: impl AsRef<Path>, format: CorpusFormat) -> Result<Corpus> {
    let path = path.as_ref();
    let rows = match format {
        CorpusFormat::Csv => read_csv(path)?,
        CorpusFormat::Jsonl => read_jsonl(path)?,
    };
    let corpus = Corpus::new(
        rows,
        CorpusSource::File {
            path: path.to_path_buf(),
        },
    );
    if let Some(v) = super::validate_corpus(&corpus).into_iter().next() {
        return Err(match v.rule {
            super::Rule::DuplicateTweetId => Error::DuplicateId {
                row: v.row,
                id: corpus.rows()[v.row - 1].tweet_id.clone(),
            },
            _ => Error::row(v.row, v.detail),
        });
    }
    Ok(corpus)
}

/// Write a corpus in the given format.
///
/// The score column set is the union of model ids across rows; rows missing
/// a model's score get a null cell. The `text` column is emitted only when
/// at least one row carries text. Loading the written file reproduces the
/// corpus rows exactly (empty text is normalised to null).
pub fn write_corpus(corpus: &Corpus, path: impl AsRef<Path>, format: CorpusFormat) -> Result<()> {
    let path = path.as_ref();
    match format {
        CorpusFormat::Csv => write_csv(corpus, path),
        CorpusFormat::Jsonl => write_jsonl(corpus, path),
    }
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

struct ColumnMap {
    /// Index of each fixed column in the header.
    fixed: [usize; 20],
    /// (column index, model id) for every score column.
    scores: Vec<(usize, String)>,
    /// Index of the text column, if present.
    text: Option<usize>,
}

fn map_header(header: &csv::StringRecord) -> Result<ColumnMap> {
    let mut fixed = [usize::MAX; 20];
    let mut scores = Vec::new();
    let mut text = None;

    for (idx, name) in header.iter().enumerate() {
        if let Some(pos) = FIXED_COLUMNS.iter().position(|c| *c == name) {
            if fixed[pos] != usize::MAX {
                return Err(Error::schema(format!("duplicate column `{name}`")));
            }
            fixed[pos] = idx;
        } else if let Some(model) = name.strip_prefix(SCORE_PREFIX) {
            if model.is_empty() {
                return Err(Error::schema(
                    "score column with empty model id".to_string(),
                ));
            }
            scores.push((idx, model.to_string()));
        } else if name == "text" {
            text = Some(idx);
        } else {
            return Err(Error::schema(format!("unrecognised column `{name}`")));
        }
    }

    for (pos, col) in FIXED_COLUMNS.iter().enumerate() {
        if fixed[pos] == usize::MAX {
            return Err(Error::schema(format!("missing required column `{col}`")));
        }
    }

    Ok(ColumnMap {
        fixed,
        scores,
        text,
    })
}

fn cell(record: &csv::StringRecord, idx: usize) -> &str {
    record.get(idx).unwrap_or("")
}

fn parse_u64(row: usize, col: &str, raw: &str) -> Result<u64> {
    raw.parse()
        .map_err(|_| Error::row(row, format!("column `{col}`: invalid count `{raw}`")))
}

fn parse_bool(row: usize, col: &str, raw: &str) -> Result<bool> {
    match raw {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(Error::row(
            row,
            format!("column `{col}`: expected `true` or `false`, got `{raw}`"),
        )),
    }
}

fn parse_opt_bool(row: usize, col: &str, raw: &str) -> Result<Option<bool>> {
    if raw.is_empty() {
        Ok(None)
    } else {
        parse_bool(row, col, raw).map(Some)
    }
}

fn parse_score(row: usize, model: &str, raw: &str) -> Result<f64> {
    let value: f64 = raw.parse().map_err(|_| {
        Error::row(
            row,
            format!("column `score:{model}`: invalid number `{raw}`"),
        )
    })?;
    if !value.is_finite() || !(0.0..=1.0).contains(&value) {
        return Err(Error::row(
            row,
            format!("column `score:{model}`: score {raw} outside [0, 1]"),
        ));
    }
    Ok(value)
}

fn read_csv(path: &Path) -> Result<Vec<AnnotatedTweet>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)?;
    let header = reader.headers()?.clone();
    let map = map_header(&header)?;

    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let rownum = i + 1;
        let record = record?;
        rows.push(parse_record(rownum, &record, &map)?);
    }
    Ok(rows)
}

fn parse_record(
    rownum: usize,
    record: &csv::StringRecord,
    map: &ColumnMap,
) -> Result<AnnotatedTweet> {
    let f = |pos: usize| cell(record, map.fixed[pos]);

    let tweet_id = f(0).to_string();
    if tweet_id.is_empty() {
        return Err(Error::row(rownum, "column `tweet_id`: empty".to_string()));
    }
    let stratum = f(1).to_string();
    if stratum.is_empty() {
        return Err(Error::row(rownum, "column `stratum`: empty".to_string()));
    }
    let sample_kind = SampleKind::parse(f(2)).ok_or_else(|| {
        Error::row(
            rownum,
            format!("column `sample_kind`: unknown value `{}`", f(2)),
        )
    })?;
    let primary_label = Label::parse(f(3)).ok_or_else(|| {
        Error::row(
            rownum,
            format!("column `primary_label`: unknown value `{}`", f(3)),
        )
    })?;
    let violent = parse_opt_bool(rownum, "violent", f(4))?;
    let scam = parse_opt_bool(rownum, "scam", f(5))?;
    let adult = parse_opt_bool(rownum, "adult", f(6))?;
    let likes = parse_u64(rownum, "likes", f(7))?;
    let replies = parse_u64(rownum, "replies", f(8))?;
    let retweets = parse_u64(rownum, "retweets", f(9))?;
    let quotes = parse_u64(rownum, "quotes", f(10))?;
    let removed = parse_bool(rownum, "removed", f(11))?;
    let removal_reason = RemovalReason::parse(f(12)).ok_or_else(|| {
        Error::row(
            rownum,
            format!("column `removal_reason`: unknown value `{}`", f(12)),
        )
    })?;
    let author_id = f(13).to_string();
    let author_verified = parse_bool(rownum, "author_verified", f(14))?;
    let followers = parse_u64(rownum, "followers", f(15))?;
    let following = parse_u64(rownum, "following", f(16))?;
    let tweet_count = parse_u64(rownum, "tweet_count", f(17))?;
    let is_reply = parse_bool(rownum, "is_reply", f(18))?;
    let possibly_sensitive = parse_bool(rownum, "possibly_sensitive", f(19))?;

    let mut scores = BTreeMap::new();
    for (idx, model) in &map.scores {
        let raw = cell(record, *idx);
        if !raw.is_empty() {
            scores.insert(model.clone(), parse_score(rownum, model, raw)?);
        }
    }

    let text = map.text.and_then(|idx| {
        let raw = cell(record, idx);
        if raw.is_empty() {
            None
        } else {
            Some(raw.to_string())
        }
    });

    Ok(AnnotatedTweet {
        tweet_id,
        stratum,
        sample_kind,
        primary_label,
        violent,
        scam,
        adult,
        likes,
        replies,
        retweets,
        quotes,
        removed,
        removal_reason,
        author_id,
        author_verified,
        followers,
        following,
        tweet_count,
        is_reply,
        possibly_sensitive,
        scores,
        text,
    })
}

fn write_csv(corpus: &Corpus, path: &Path) -> Result<()> {
    let model_ids: Vec<String> = corpus.model_ids().into_iter().collect();
    let mut writer = csv::Writer::from_path(path)?;

    let mut header: Vec<String> = FIXED_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend(model_ids.iter().map(|m| format!("{SCORE_PREFIX}{m}")));
    if corpus.has_text() {
        header.push("text".to_string());
    }
    writer.write_record(&header)?;

    for row in corpus.rows() {
        let mut record: Vec<String> = Vec::with_capacity(header.len());
        record.push(row.tweet_id.clone());
        record.push(row.stratum.clone());
        record.push(row.sample_kind.as_str().to_string());
        record.push(row.primary_label.as_str().to_string());
        record.push(opt_bool_str(row.violent));
        record.push(opt_bool_str(row.scam));
        record.push(opt_bool_str(row.adult));
        record.push(row.likes.to_string());
        record.push(row.replies.to_string());
        record.push(row.retweets.to_string());
        record.push(row.quotes.to_string());
        record.push(row.removed.to_string());
        record.push(row.removal_reason.as_str().to_string());
        record.push(row.author_id.clone());
        record.push(row.author_verified.to_string());
        record.push(row.followers.to_string());
        record.push(row.following.to_string());
        record.push(row.tweet_count.to_string());
        record.push(row.is_reply.to_string());
        record.push(row.possibly_sensitive.to_string());
        for model in &model_ids {
            record.push(
                row.scores
                    .get(model)
                    .map(|s| fmt_roundtrip(*s))
                    .unwrap_or_default(),
            );
        }
        if corpus.has_text() {
            record.push(row.text.clone().unwrap_or_default());
        }
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

fn opt_bool_str(v: Option<bool>) -> String {
    v.map(|b| b.to_string()).unwrap_or_default()
}

// ---------------------------------------------------------------------------
// JSONL
// ---------------------------------------------------------------------------

fn read_jsonl(path: &Path) -> Result<Vec<AnnotatedTweet>> {
    let reader = BufReader::new(File::open(path)?);
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let rownum = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(&line)?;
        rows.push(parse_json_row(rownum, value)?);
    }
    Ok(rows)
}

fn parse_json_row(rownum: usize, value: Value) -> Result<AnnotatedTweet> {
    let Value::Object(mut obj) = value else {
        return Err(Error::row(rownum, "expected a JSON object".to_string()));
    };

    // Reject unknown keys up front so schema drift surfaces loudly.
    for key in obj.keys() {
        let known = FIXED_COLUMNS.contains(&key.as_str())
            || key == "text"
            || key
                .strip_prefix(SCORE_PREFIX)
                .is_some_and(|m| !m.is_empty());
        if !known {
            return Err(Error::schema(format!("unrecognised column `{key}`")));
        }
    }

    let mut take = |col: &str| -> Result<Value> {
        obj.remove(col)
            .ok_or_else(|| Error::schema(format!("missing required column `{col}`")))
    };

    let json_str = |row: usize, col: &str, v: Value| -> Result<String> {
        match v {
            Value::String(s) if !s.is_empty() => Ok(s),
            other => Err(Error::row(
                row,
                format!("column `{col}`: expected non-empty string, got {other}"),
            )),
        }
    };
    let json_u64 = |row: usize, col: &str, v: Value| -> Result<u64> {
        v.as_u64().ok_or_else(|| {
            Error::row(
                row,
                format!("column `{col}`: expected a non-negative integer"),
            )
        })
    };
    let json_bool = |row: usize, col: &str, v: Value| -> Result<bool> {
        v.as_bool()
            .ok_or_else(|| Error::row(row, format!("column `{col}`: expected a boolean")))
    };
    let json_opt_bool = |row: usize, col: &str, v: Value| -> Result<Option<bool>> {
        match v {
            Value::Null => Ok(None),
            Value::Bool(b) => Ok(Some(b)),
            _ => Err(Error::row(
                row,
                format!("column `{col}`: expected a boolean or null"),
            )),
        }
    };

    let tweet_id = json_str(rownum, "tweet_id", take("tweet_id")?)?;
    let stratum = json_str(rownum, "stratum", take("stratum")?)?;
    let sample_kind_raw = json_str(rownum, "sample_kind", take("sample_kind")?)?;
    let sample_kind = SampleKind::parse(&sample_kind_raw).ok_or_else(|| {
        Error::row(
            rownum,
            format!("column `sample_kind`: unknown value `{sample_kind_raw}`"),
        )
    })?;
    let label_raw = json_str(rownum, "primary_label", take("primary_label")?)?;
    let primary_label = Label::parse(&label_raw).ok_or_else(|| {
        Error::row(
            rownum,
            format!("column `primary_label`: unknown value `{label_raw}`"),
        )
    })?;
    let violent = json_opt_bool(rownum, "violent", take("violent")?)?;
    let scam = json_opt_bool(rownum, "scam", take("scam")?)?;
    let adult = json_opt_bool(rownum, "adult", take("adult")?)?;
    let likes = json_u64(rownum, "likes", take("likes")?)?;
    let replies = json_u64(rownum, "replies", take("replies")?)?;
    let retweets = json_u64(rownum, "retweets", take("retweets")?)?;
    let quotes = json_u64(rownum, "quotes", take("quotes")?)?;
    let removed = json_bool(rownum, "removed", take("removed")?)?;
    let reason_raw = json_str(rownum, "removal_reason", take("removal_reason")?)?;
    let removal_reason = RemovalReason::parse(&reason_raw).ok_or_else(|| {
        Error::row(
            rownum,
            format!("column `removal_reason`: unknown value `{reason_raw}`"),
        )
    })?;
    let author_id = json_str(rownum, "author_id", take("author_id")?)?;
    let author_verified = json_bool(rownum, "author_verified", take("author_verified")?)?;
    let followers = json_u64(rownum, "followers", take("followers")?)?;
    let following = json_u64(rownum, "following", take("following")?)?;
    let tweet_count = json_u64(rownum, "tweet_count", take("tweet_count")?)?;
    let is_reply = json_bool(rownum, "is_reply", take("is_reply")?)?;
    let possibly_sensitive = json_bool(rownum, "possibly_sensitive", take("possibly_sensitive")?)?;

    let mut scores = BTreeMap::new();
    let mut text = None;
    for (key, v) in obj {
        if let Some(model) = key.strip_prefix(SCORE_PREFIX) {
            match v {
                Value::Null => {}
                Value::Number(n) => {
                    let x = n.as_f64().ok_or_else(|| {
                        Error::row(rownum, format!("column `{key}`: invalid number"))
                    })?;
                    if !x.is_finite() || !(0.0..=1.0).contains(&x) {
                        return Err(Error::row(
                            rownum,
                            format!("column `{key}`: score {x} outside [0, 1]"),
                        ));
                    }
                    scores.insert(model.to_string(), x);
                }
                _ => {
                    return Err(Error::row(
                        rownum,
                        format!("column `{key}`: expected a number or null"),
                    ))
                }
            }
        } else if key == "text" {
            text = match v {
                Value::Null => None,
                Value::String(s) if s.is_empty() => None,
                Value::String(s) => Some(s),
                _ => {
                    return Err(Error::row(
                        rownum,
                        "column `text`: expected a string or null".to_string(),
                    ))
                }
            };
        }
    }

    Ok(AnnotatedTweet {
        tweet_id,
        stratum,
        sample_kind,
        primary_label,
        violent,
        scam,
        adult,
        likes,
        replies,
        retweets,
        quotes,
        removed,
        removal_reason,
        author_id,
        author_verified,
        followers,
        following,
        tweet_count,
        is_reply,
        possibly_sensitive,
        scores,
        text,
    })
}

fn write_jsonl(corpus: &Corpus, path: &Path) -> Result<()> {
    let model_ids: Vec<String> = corpus.model_ids().into_iter().collect();
    let mut out = BufWriter::new(File::create(path)?);
    for row in corpus.rows() {
        let mut obj = Map::new();
        obj.insert("tweet_id".into(), Value::String(row.tweet_id.clone()));
        obj.insert("stratum".into(), Value::String(row.stratum.clone()));
        obj.insert(
            "sample_kind".into(),
            Value::String(row.sample_kind.as_str().into()),
        );
        obj.insert(
            "primary_label".into(),
            Value::String(row.primary_label.as_str().into()),
        );
        obj.insert("violent".into(), opt_bool_json(row.violent));
        obj.insert("scam".into(), opt_bool_json(row.scam));
        obj.insert("adult".into(), opt_bool_json(row.adult));
        obj.insert("likes".into(), Value::from(row.likes));
        obj.insert("replies".into(), Value::from(row.replies));
        obj.insert("retweets".into(), Value::from(row.retweets));
        obj.insert("quotes".into(), Value::from(row.quotes));
        obj.insert("removed".into(), Value::Bool(row.removed));
        obj.insert(
            "removal_reason".into(),
            Value::String(row.removal_reason.as_str().into()),
        );
        obj.insert("author_id".into(), Value::String(row.author_id.clone()));
        obj.insert("author_verified".into(), Value::Bool(row.author_verified));
        obj.insert("followers".into(), Value::from(row.followers));
        obj.insert("following".into(), Value::from(row.following));
        obj.insert("tweet_count".into(), Value::from(row.tweet_count));
        obj.insert("is_reply".into(), Value::Bool(row.is_reply));
        obj.insert(
            "possibly_sensitive".into(),
            Value::Bool(row.possibly_sensitive),
        );
        for model in &model_ids {
            let v = match row.scores.get(model) {
                Some(s) => Value::from(*s),
                None => Value::Null,
            };
            obj.insert(format!("{SCORE_PREFIX}{model}"), v);
        }
        if corpus.has_text() {
            obj.insert(
                "text".into(),
                row.text.clone().map(Value::String).unwrap_or(Value::Null),
            );
        }
        serde_json::to_writer(&mut out, &Value::Object(obj))?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

fn opt_bool_json(v: Option<bool>) -> Value {
    v.map(Value::Bool).unwrap_or(Value::Null)
}
