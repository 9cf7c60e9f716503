//! Concept-based formula search over a pre-annotated article corpus.

mod corpus;
mod index;
mod query;

pub use corpus::{
    load_corpus, Article, Corpus, CorpusCounts, CorpusError, CorpusErrorKind, Formula, Segment, SegmentType,
    SymbolOccurrence, TextOccurrence,
};
pub use index::{build_index, Index};
pub use query::{
    hit_details, search, suggest, ArticleInfo, FormulaDetails, MatchedConcept, SearchError, SearchHit, SearchPage,
    SearchQuery, SuggestError, Suggestion, SuggestionSource, UnknownFormula, DEFAULT_PAGE_SIZE, MAX_PAGE_SIZE,
    MAX_SUGGESTIONS,
};
