//! Canonical delimiter-separated persistence: one file each for users,
//! items and events, with a header row and six fractional digits for
//! trait scores.

use std::fs::{self, File};
use std::path::{Path, PathBuf};

use super::{DataError, Dataset, EventRecord, Item};
use crate::personality::{MbtiType, PersonalityModelKind, TraitVector};
use crate::recommender::UserProfile;

const USERS_HEADER: [&str; 16] = [
    "user_id", "big5_o", "big5_c", "big5_e", "big5_a", "big5_n", "eys_p", "eys_e", "eys_n",
    "hex_h", "hex_e", "hex_x", "hex_a", "hex_c", "hex_o", "mbti",
];
const ITEMS_HEADER: [&str; 2] = ["item_id", "labels"];
const EVENTS_HEADER: [&str; 4] = ["user_id", "item_id", "timestamp", "rating"];

fn io_err(path: &Path, source: std::io::Error) -> DataError {
    DataError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_err(path: &Path, line: u64, message: String) -> DataError {
    DataError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    }
}

fn csv_err(path: &Path, err: &csv::Error) -> DataError {
    let line = err.position().map(|p| p.line()).unwrap_or(0);
    parse_err(path, line, err.to_string())
}

struct SourceFile {
    path: PathBuf,
    reader: csv::Reader<File>,
}

impl SourceFile {
    fn open(path: &Path, header: &[&str]) -> Result<SourceFile, DataError> {
        let file = File::open(path).map_err(|e| io_err(path, e))?;
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
        let found = reader.headers().map_err(|e| csv_err(path, &e))?;
        if found.len() != header.len() || found.iter().zip(header).any(|(a, b)| a != *b) {
            return Err(parse_err(
                path,
                1,
                format!("expected header {:?}, found {:?}", header.join(","), found),
            ));
        }
        Ok(SourceFile {
            path: path.to_path_buf(),
            reader,
        })
    }

    fn rows(&mut self) -> Result<Vec<(u64, csv::StringRecord)>, DataError> {
        let mut rows = Vec::new();
        for record in self.reader.records() {
            let record = record.map_err(|e| csv_err(&self.path, &e))?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            rows.push((line, record));
        }
        Ok(rows)
    }
}

fn parse_score(path: &Path, line: u64, column: &str, raw: &str) -> Result<f64, DataError> {
    raw.parse::<f64>()
        .map_err(|e| parse_err(path, line, format!("column {column}: {e}")))
}

fn parse_vector(
    path: &Path,
    line: u64,
    model: PersonalityModelKind,
    columns: &[&str],
    record: &csv::StringRecord,
    offset: usize,
) -> Result<TraitVector, DataError> {
    let mut scores = Vec::with_capacity(columns.len());
    for (k, column) in columns.iter().enumerate() {
        scores.push(parse_score(path, line, column, &record[offset + k])?);
    }
    TraitVector::new(model, scores).map_err(|e| parse_err(path, line, e.to_string()))
}

fn load_users(path: &Path) -> Result<Vec<UserProfile>, DataError> {
    let mut source = SourceFile::open(path, &USERS_HEADER)?;
    let mut users = Vec::new();
    for (line, record) in source.rows()? {
        let big5 = parse_vector(
            path,
            line,
            PersonalityModelKind::Big5,
            &USERS_HEADER[1..6],
            &record,
            1,
        )?;
        let eysenck = parse_vector(
            path,
            line,
            PersonalityModelKind::Eysenck,
            &USERS_HEADER[6..9],
            &record,
            6,
        )?;
        let hexaco = parse_vector(
            path,
            line,
            PersonalityModelKind::Hexaco,
            &USERS_HEADER[9..15],
            &record,
            9,
        )?;
        let mbti = record[15]
            .parse::<MbtiType>()
            .map_err(|e| parse_err(path, line, e.to_string()))?;
        let profile = UserProfile::new(record[0].to_string(), big5, eysenck, hexaco, mbti)
            .map_err(|e| parse_err(path, line, e.to_string()))?;
        users.push(profile);
    }
    Ok(users)
}

fn load_items(path: &Path) -> Result<Vec<Item>, DataError> {
    let mut source = SourceFile::open(path, &ITEMS_HEADER)?;
    let mut items = Vec::new();
    for (_, record) in source.rows()? {
        items.push(Item {
            id: record[0].to_string(),
            labels: record[1].split(';').map(str::to_string).collect(),
        });
    }
    Ok(items)
}

fn load_events(path: &Path) -> Result<Vec<EventRecord>, DataError> {
    let mut source = SourceFile::open(path, &EVENTS_HEADER)?;
    let mut records = Vec::new();
    for (line, record) in source.rows()? {
        let timestamp = record[2]
            .parse::<i64>()
            .map_err(|e| parse_err(path, line, format!("column timestamp: {e}")))?;
        let rating = if record[3].is_empty() {
            None
        } else {
            Some(
                record[3]
                    .parse::<u8>()
                    .map_err(|e| parse_err(path, line, format!("column rating: {e}")))?,
            )
        };
        records.push(EventRecord {
            user: record[0].to_string(),
            item: record[1].to_string(),
            timestamp,
            rating,
        });
    }
    Ok(records)
}

/// Loads and validates a dataset from its three files.
pub fn load_dataset(
    users_path: &Path,
    items_path: &Path,
    events_path: &Path,
) -> Result<Dataset, DataError> {
    Dataset::new(
        load_users(users_path)?,
        load_items(items_path)?,
        load_events(events_path)?,
    )
}

struct SinkFile {
    path: PathBuf,
    writer: csv::Writer<File>,
}

impl SinkFile {
    fn create(path: PathBuf) -> Result<SinkFile, DataError> {
        let file = File::create(&path).map_err(|e| io_err(&path, e))?;
        Ok(SinkFile {
            writer: csv::Writer::from_writer(file),
            path,
        })
    }

    fn write<I, S>(&mut self, fields: I) -> Result<(), DataError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).map_err(|e| {
            io_err(
                &self.path,
                std::io::Error::other(e.to_string()),
            )
        })
    }

    fn finish(mut self) -> Result<(), DataError> {
        self.writer.flush().map_err(|e| io_err(&self.path, e))
    }
}

/// Writes `users.csv`, `items.csv` and `events.csv` into `dir` in canonical
/// form: id-sorted rows, fixed column order, six fractional digits. Saving
/// the same dataset twice yields byte-identical files.
pub fn save_dataset(ds: &Dataset, dir: &Path) -> Result<(), DataError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;

    let mut users = SinkFile::create(dir.join("users.csv"))?;
    users.write(USERS_HEADER)?;
    for profile in ds.users() {
        let mut fields: Vec<String> = vec![profile.id().to_string()];
        for vector in [profile.big5(), profile.eysenck(), profile.hexaco()] {
            fields.extend(vector.scores().iter().map(|s| format!("{s:.6}")));
        }
        fields.push(profile.mbti().to_string());
        users.write(&fields)?;
    }
    users.finish()?;

    let mut items = SinkFile::create(dir.join("items.csv"))?;
    items.write(ITEMS_HEADER)?;
    for item in ds.items() {
        items.write(&[item.id.clone(), item.labels.join(";")])?;
    }
    items.finish()?;

    let mut events = SinkFile::create(dir.join("events.csv"))?;
    events.write(EVENTS_HEADER)?;
    for event in ds.events() {
        events.write(&[
            ds.user(event.user).id().to_string(),
            ds.item(event.item).id.clone(),
            event.timestamp.to_string(),
            event.rating.map(|r| r.to_string()).unwrap_or_default(),
        ])?;
    }
    events.finish()?;
    Ok(())
}
