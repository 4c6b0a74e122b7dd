#pragma once

#include <string>

#include "docdet/evaluation.hpp"

namespace docdet {

/// MIDV-500 layout: <root>/<NN_doctype>/images/<clip>/<frame>.(png|jpg)
/// with per-frame ground truth <root>/<NN_doctype>/ground_truth/<clip>/
/// <frame>.json carrying {"quad": [[x,y] * 4]}. Frames without a readable
/// annotation are skipped with a warning. Each item is tagged with the
/// vertex-visibility subsets "4in" (all vertices inside the frame) and
/// "3in" (at least three inside).
///
/// Template sizes default by document-type keyword (passport booklets
/// 1250x880, "_old" ID-2 cards 1050x740, everything else 856x540) and can
/// be overridden per directory via <root>/template_sizes.txt lines of the
/// form "<doctype-dir> <width> <height>".
Dataset load_midv500(const std::string& root);

/// SmartDoc layout: <root>/background0N/<clip>/<frame images> with the
/// challenge ground-truth XML at <clip>.gt.xml (next to the clip
/// directory or inside it as gt.xml); frames match annotation entries by
/// the trailing integer in their file name. All documents use the A4
/// template at 4 px/mm (840x1188). Items are tagged with their
/// background subset.
Dataset load_smartdoc(const std::string& root);

}  // namespace docdet
