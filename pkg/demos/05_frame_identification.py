# Tell five APs' frames apart from SIG-field features alone.
import numpy as np

from cechain.sigpca import fit_and_score, ingest_csv, sample_corpus_path, synthetic_corpus

train, test = synthetic_corpus(40, seed=0), synthetic_corpus(20, seed=1)
rep = fit_and_score(train, test, k=2)
print("eigenvalues:", np.round(rep.model.eigenvalues, 4))
print("explained by 2 PCs:", round(rep.model.eigenvalues[:2].sum() / rep.model.eigenvalues.sum(), 4))
print("AP accuracy:", rep.ap.accuracy, " CE accuracy:", rep.ce.accuracy)
print(rep.ap.to_json())

scores = rep.model.transform(test)
for ap in sorted({r.ap_label for r in test}):
    ce = np.array([r.ap_label == ap and r.is_ce for r in test])
    print(f"{ap} CE centroid in PC space: {np.round(scores[ce].mean(axis=0), 3)}")

print("shipped sample corpus rows:", len(ingest_csv(sample_corpus_path())))
