//! Font, background and word-list inputs.
//!
//! Fonts and backgrounds are discovered recursively and sorted by path, so
//! ids are stable for a given directory tree regardless of where it lives.
//! Files that fail to parse are skipped and listed in `warnings`.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use image::RgbImage;
use sha2::{Digest, Sha256};
use walkdir::WalkDir;

use crate::error::{Error, Result};
use crate::glyph::FontFace;

const FONT_EXTENSIONS: &[&str] = &["ttf", "otf"];
const IMAGE_EXTENSIONS: &[&str] = &["png", "jpg", "jpeg"];

/// Decoded backgrounds are kept in memory up to this many bytes.
const BACKGROUND_CACHE_BYTES: usize = 512 << 20;

#[derive(Debug, Clone)]
pub struct FontEntry {
    pub path: PathBuf,
    pub family: String,
    pub face: FontFace,
}

#[derive(Debug, Clone)]
pub struct FontLibrary {
    entries: Vec<FontEntry>,
    faces: Vec<FontFace>,
    pub warnings: Vec<String>,
    /// SHA-256 over relative path and content of every loaded font.
    pub digest: String,
}

impl FontLibrary {
    pub fn entries(&self) -> &[FontEntry] {
        &self.entries
    }

    /// Faces indexed by font id.
    pub fn faces(&self) -> &[FontFace] {
        &self.faces
    }

    pub fn get(&self, font_id: usize) -> Option<&FontEntry> {
        self.entries.get(font_id)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn files_with_extension(dir: &Path, extensions: &[&str]) -> Result<Vec<PathBuf>> {
    if !dir.is_dir() {
        return Err(Error::io(
            dir,
            std::io::Error::new(std::io::ErrorKind::NotFound, "not a directory"),
        ));
    }
    let mut paths = Vec::new();
    for entry in WalkDir::new(dir).follow_links(true) {
        let entry = entry.map_err(|e| {
            let path = e.path().unwrap_or(dir).to_path_buf();
            Error::io(path, e.into())
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let matches = entry
            .path()
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| extensions.iter().any(|x| x.eq_ignore_ascii_case(e)));
        if matches {
            paths.push(entry.into_path());
        }
    }
    paths.sort();
    Ok(paths)
}

fn digest_entry(hasher: &mut Sha256, root: &Path, path: &Path, bytes: &[u8]) {
    let rel = path.strip_prefix(root).unwrap_or(path);
    let rel = rel.to_string_lossy().replace('\\', "/");
    hasher.update((rel.len() as u64).to_le_bytes());
    hasher.update(rel.as_bytes());
    hasher.update((bytes.len() as u64).to_le_bytes());
    hasher.update(bytes);
}

fn family_name(bytes: &[u8]) -> Option<String> {
    let face = ttf_parser::Face::parse(bytes, 0).ok()?;
    face.names()
        .into_iter()
        .filter(|n| n.name_id == ttf_parser::name_id::FAMILY)
        .find_map(|n| n.to_string())
}

pub fn load_fonts(dir: &Path) -> Result<FontLibrary> {
    let mut entries = Vec::new();
    let mut warnings = Vec::new();
    let mut hasher = Sha256::new();
    for path in files_with_extension(dir, FONT_EXTENSIONS)? {
        let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
        let family = family_name(&bytes);
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let digest_copy = bytes.clone();
        match FontFace::from_bytes(bytes, stem.as_str()) {
            Ok(face) => {
                digest_entry(&mut hasher, dir, &path, &digest_copy);
                entries.push(FontEntry {
                    family: family.unwrap_or(stem),
                    path,
                    face,
                });
            }
            Err(message) => {
                let warning = format!("skipping font {}: {message}", path.display());
                log::warn!("{warning}");
                warnings.push(warning);
            }
        }
    }
    if entries.is_empty() {
        return Err(Error::EmptyLibrary(dir.to_path_buf()));
    }
    let faces = entries.iter().map(|e| e.face.clone()).collect();
    Ok(FontLibrary {
        entries,
        faces,
        warnings,
        digest: hex::encode(hasher.finalize()),
    })
}

#[derive(Debug, Clone)]
pub struct BackgroundEntry {
    pub path: PathBuf,
    pub width: u32,
    pub height: u32,
}

#[derive(Debug, Clone)]
pub struct BackgroundPool {
    entries: Vec<BackgroundEntry>,
    cache: Vec<Option<Arc<RgbImage>>>,
    pub warnings: Vec<String>,
    pub digest: String,
}

impl BackgroundPool {
    /// A pool over already decoded images, e.g. for benchmarks.
    pub fn from_images(images: Vec<RgbImage>) -> Self {
        let entries = images
            .iter()
            .enumerate()
            .map(|(i, img)| BackgroundEntry {
                path: PathBuf::from(format!("<memory:{i}>")),
                width: img.width(),
                height: img.height(),
            })
            .collect();
        let mut hasher = Sha256::new();
        for img in &images {
            hasher.update(img.width().to_le_bytes());
            hasher.update(img.height().to_le_bytes());
            hasher.update(img.as_raw());
        }
        Self {
            entries,
            cache: images.into_iter().map(|i| Some(Arc::new(i))).collect(),
            warnings: Vec::new(),
            digest: hex::encode(hasher.finalize()),
        }
    }

    pub fn entries(&self) -> &[BackgroundEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Decoded RGB pixels of background `index`.
    pub fn image(&self, index: usize) -> Result<Arc<RgbImage>> {
        if let Some(img) = &self.cache[index] {
            return Ok(Arc::clone(img));
        }
        let path = &self.entries[index].path;
        let img = image::open(path).map_err(|e| Error::image(path, e))?;
        Ok(Arc::new(img.into_rgb8()))
    }
}

pub fn load_backgrounds(dir: &Path, min_size: [u32; 2]) -> Result<BackgroundPool> {
    let mut entries = Vec::new();
    let mut cache = Vec::new();
    let mut warnings = Vec::new();
    let mut hasher = Sha256::new();
    let mut cached_bytes = 0usize;
    let mut warn = |w: String| {
        log::warn!("{w}");
        warnings.push(w);
    };
    for path in files_with_extension(dir, IMAGE_EXTENSIONS)? {
        let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
        let decoded = match image::load_from_memory(&bytes) {
            Ok(img) => img.into_rgb8(),
            Err(e) => {
                warn(format!("skipping background {}: {e}", path.display()));
                continue;
            }
        };
        let (width, height) = decoded.dimensions();
        if width < min_size[0] || height < min_size[1] {
            warn(format!(
                "skipping background {}: {width}x{height} is below {}x{}",
                path.display(),
                min_size[0],
                min_size[1]
            ));
            continue;
        }
        digest_entry(&mut hasher, dir, &path, &bytes);
        cached_bytes += decoded.as_raw().len();
        cache.push((cached_bytes <= BACKGROUND_CACHE_BYTES).then(|| Arc::new(decoded)));
        entries.push(BackgroundEntry {
            path,
            width,
            height,
        });
    }
    if entries.is_empty() {
        return Err(Error::EmptyPool(dir.to_path_buf()));
    }
    Ok(BackgroundPool {
        entries,
        cache,
        warnings,
        digest: hex::encode(hasher.finalize()),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordCorpus {
    words: Vec<String>,
    pub digest: String,
}

impl WordCorpus {
    pub fn from_words<I, S>(words: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let words: Vec<String> = words
            .into_iter()
            .map(|w| w.as_ref().trim().to_string())
            .filter(|w| !w.is_empty())
            .collect();
        if words.is_empty() {
            return Err(Error::EmptyCorpus(PathBuf::from("<memory>")));
        }
        let mut hasher = Sha256::new();
        for w in &words {
            hasher.update(w.as_bytes());
            hasher.update(b"\n");
        }
        Ok(Self {
            words,
            digest: hex::encode(hasher.finalize()),
        })
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// One word per line; surrounding whitespace trimmed, blank lines dropped.
pub fn load_corpus(path: &Path) -> Result<WordCorpus> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    WordCorpus::from_words(text.lines()).map_err(|e| match e {
        Error::EmptyCorpus(_) => Error::EmptyCorpus(path.to_path_buf()),
        other => other,
    })
}

/// Everything a generation run draws from.
#[derive(Debug, Clone)]
pub struct Assets {
    pub fonts: FontLibrary,
    pub backgrounds: BackgroundPool,
    pub corpus: WordCorpus,
}

impl Assets {
    pub fn load(fonts: &Path, backgrounds: &Path, corpus: &Path, min_background: [u32; 2]) -> Result<Self> {
        Ok(Self {
            fonts: load_fonts(fonts)?,
            backgrounds: load_backgrounds(backgrounds, min_background)?,
            corpus: load_corpus(corpus)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::Rgb;

    pub(crate) fn fonts_dir() -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../assets/fonts")
    }

    #[test]
    fn loads_fonts_in_path_order() {
        let tmp = tempfile::tempdir().unwrap();
        for name in ["DejaVuSerif.ttf", "DejaVuSans.ttf", "DejaVuSansMono.ttf"] {
            fs::copy(fonts_dir().join(name), tmp.path().join(name)).unwrap();
        }
        let lib = load_fonts(tmp.path()).unwrap();
        assert_eq!(lib.len(), 3);
        let names: Vec<_> = lib
            .entries()
            .iter()
            .map(|e| e.path.file_name().unwrap().to_str().unwrap().to_string())
            .collect();
        assert_eq!(names, ["DejaVuSans.ttf", "DejaVuSansMono.ttf", "DejaVuSerif.ttf"]);
        assert_eq!(lib.entries()[0].family, "DejaVu Sans");
        assert!(lib.warnings.is_empty());

        let again = load_fonts(tmp.path()).unwrap();
        assert_eq!(again.digest, lib.digest);
    }

    #[test]
    fn corrupt_font_is_skipped_with_warning() {
        let tmp = tempfile::tempdir().unwrap();
        fs::copy(fonts_dir().join("DejaVuSans.ttf"), tmp.path().join("a.ttf")).unwrap();
        fs::create_dir(tmp.path().join("sub")).unwrap();
        fs::copy(fonts_dir().join("DejaVuSerif.ttf"), tmp.path().join("sub/b.otf")).unwrap();
        fs::write(tmp.path().join("broken.ttf"), b"not a font").unwrap();
        let lib = load_fonts(tmp.path()).unwrap();
        assert_eq!(lib.len(), 2);
        assert_eq!(lib.warnings.len(), 1);
        assert!(lib.warnings[0].contains("broken.ttf"));
    }

    #[test]
    fn empty_font_dir_is_an_error() {
        let tmp = tempfile::tempdir().unwrap();
        assert!(matches!(load_fonts(tmp.path()), Err(Error::EmptyLibrary(_))));
        assert!(matches!(
            load_fonts(&tmp.path().join("missing")),
            Err(Error::Io { .. })
        ));
    }

    fn write_png(path: &Path, w: u32, h: u32) {
        RgbImage::from_pixel(w, h, Rgb([10, 20, 30])).save(path).unwrap();
    }

    #[test]
    fn backgrounds_respect_minimum_size() {
        let tmp = tempfile::tempdir().unwrap();
        write_png(&tmp.path().join("big.png"), 640, 480);
        let pool = load_backgrounds(tmp.path(), [64, 64]).unwrap();
        assert_eq!(pool.len(), 1);
        assert_eq!((pool.entries()[0].width, pool.entries()[0].height), (640, 480));
        assert_eq!(pool.image(0).unwrap().dimensions(), (640, 480));

        let small = tempfile::tempdir().unwrap();
        write_png(&small.path().join("tiny.png"), 32, 32);
        assert!(matches!(
            load_backgrounds(small.path(), [64, 64]),
            Err(Error::EmptyPool(_))
        ));

        write_png(&tmp.path().join("tiny.png"), 32, 32);
        fs::write(tmp.path().join("junk.jpg"), b"garbage").unwrap();
        fs::write(tmp.path().join("notes.txt"), b"ignored").unwrap();
        let pool = load_backgrounds(tmp.path(), [64, 64]).unwrap();
        assert_eq!(pool.len(), 1);
        assert_eq!(pool.warnings.len(), 2);
    }

    #[test]
    fn corpus_parsing() {
        let tmp = tempfile::tempdir().unwrap();
        let p = tmp.path().join("words.txt");
        fs::write(&p, "cat\ndog\n").unwrap();
        assert_eq!(load_corpus(&p).unwrap().words(), ["cat", "dog"]);
        fs::write(&p, "cat \n\n  dog\r\n").unwrap();
        assert_eq!(load_corpus(&p).unwrap().words(), ["cat", "dog"]);
        fs::write(&p, "\n\n").unwrap();
        assert!(matches!(load_corpus(&p), Err(Error::EmptyCorpus(_))));
    }
}
