"""Out-of-vocabulary detection and the three query transformations.

Uses the bundled tv24 fixtures: the recorded rewrites and image captions
replay through the mock backend, so topic 752 captions exactly as the
recorded manual-selection table says.
"""

from garsearch import GeneratorConfig, build_t2t_prompt, detect_oov, generate_variants
from garsearch.generation import mock_backend
from garsearch.generation.concept_bank import bank_from_terms
from garsearch.generation.fixtures import tv24_mock_backend, tv24_topics

bank = bank_from_terms(
    ["people", "outdoors", "lineup", "dog", "park", "umbrella", "rain", "street"])

query = "Find shots of people standing in line outdoors"
oov = detect_oov(query, bank)
print(f"query: {query!r}")
print(f"out-of-vocabulary terms: {sorted(oov)}")

topic = tv24_topics()[0]
prompt = build_t2t_prompt(topic, bank, detect_oov(topic.text, bank))
print(f"\nrewrite prompt (first 2 lines):")
print("\n".join(prompt.splitlines()[:2]))

backend = mock_backend(substitutions={"standing in line": "lineup"})
from garsearch.trec_io import Topic

vs = generate_variants(Topic(801, query), GeneratorConfig(n_images=2, seed=7), backend, bank)
print(f"\nt2t rewrite: {vs.t2t_texts[0]!r}")
print(f"t2i images: {len(vs.t2i_images)} PNGs, "
      f"{len(vs.t2i_images[0].data)} bytes each, provenance {vs.t2i_images[0].provenance_prompt!r}")
print(f"i2t captions: {list(vs.i2t_captions)}")

print("\nreplaying the recorded tv24 fixtures:")
fixture_backend = tv24_mock_backend()
for topic in tv24_topics()[:3]:
    vs = generate_variants(topic, GeneratorConfig(n_images=1), fixture_backend)
    print(f"  {topic.topic_id} {topic.text!r}")
    print(f"      t2t: {vs.t2t_texts[0]!r}")
    print(f"      i2t: {vs.i2t_captions[0]!r}")
