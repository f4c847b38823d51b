// Shipped few-shot material for the segmentation prompt.

#include "iconicity/segmentation.hpp"

namespace iconicity {

const std::string& system_template() {
  static const std::string text =
      R"ix(You are a meticulous linguistic expert tasked with breaking down a provided word in a given language into its absolute semantic primitives. This includes roots, bound morphemes, and any semantic primitives that contribute to the compositional meaning of the word. You will also be provided with the words phonetic transcription, and you are tasked with breaking up the phonetic transcription to align with the semantic decomposition. You will work in {lang}. Your fluency in {lang} is native and your linguistic knowledge PhD-level familiar. To reiterate: if **ever** a decomposition can be further decomposed, you have failed. These must not be further decomposable according to our rules. This is thus not about extracting morphemes, but rather pure semantic primitives. **You are not to return anything other than segments which can be found in the word or transcription—no modifications or functional descriptions of them. NOTHING other than the literal characters found in the word and its transcription should be returned.** Observe some examples below.
{examples})ix";
  return text;
}

const std::vector<FewShotSet>& fewshot_sets() {
  static const std::vector<FewShotSet> sets = {
      {"en", "English", {
          {"deconstruct", "di:kənstrʌkt", "(de,di:),(con,kən),(struct,strʌkt)"},
          {"run", "rʌn", "(run,rʌn)"},
          {"severance", "sɛvərəns", "(sever,sɛvər),(ance,əns)"},
          {"unhappiness", "ʌnhæpɪnəs", "(un,ʌn),(happi,hæpi),(ness,nəs)"},
          {"biodiversity", "baiəvɜːrsəti", "(bio,baiəvɜː),(divers,davɜːrs),(ity,əti)"},
          {"microscopic", "mɪkrəskɒpɪk", "(micro,mɪkrə),(scop,skɒp),(ic,ɪk)"},
          {"the", "ðə", "(the,ðə)"},
          {"discontinuation", "dɪskəntɪnjuːeɪʃən", "(dis,dɪs),(con,kən),(tinu,tɪnju),(ation,eɪʃən)"},
          {"hello", "hələʊ", "(hello,hələʊ)"},
          {"shenanigans", "ʃənæniɡənz", "(shenanigan,ʃənæniɡən),(s,z)"},
      }},
      {"es", "Spanish", {
          {"desafortunadamente", "desafortunadamente", "(des,des),(a,a),(fortuna,fortuna),(da,ða),(mente,mente)"},
          {"zapatería", "θapateria", "(zapat,θapat),(eria,eria)"},
          {"imprescindible", "impresindible", "(im,im),(pre,pre),(scind,sind),(ible,iβle)"},
          {"sobremesa", "soβremesa", "(sobre,soβre),(mesa,mesa)"},
          {"envejecer", "embexer", "(en,em),(vejec,bexer),(er,er)"},
          {"antepasados", "antepasaðos", "(ante,ante),(pas,pas),(ados,aðos)"},
          {"contrarreloj", "kontrarreloj", "(contra,kontra),(reloj,reloj)"},
          {"rascacielos", "raskaθjelos", "(rasca,raska),(cielos,θjelos)"},
          {"el", "el", "(el,el)"},
          {"perro", "pero", "(perr,per),(o,o)"},
          {"gata", "gata", "(gat,gat),(a,a)"},
      }},
      {"hi", "Hindi", {
          {"किताब", "kita:b", "(किताब,kita:b)"},
          {"लड़कियाँ", "ləɽkija:ⁿ", "(लड़की,ləɽki:),(यों,jo:ⁿ)"},
          {"जाऊँगा", "dʒa:u:ⁿga:", "(जा,dʒa:),(ऊँ,u:ⁿ),(गा,ga:)"},
          {"घरवाला", "gʰərva:la:", "(घर,gʰər),(वाला,va:la)"},
          {"अनुवादक", "ənuva:dək", "(अनु,ənu),(वाद,va:d),(क,ək)"},
          {"विद्यालय", "vidja:ləj", "(विद्या,vidja:),(लय,ləj)"},
          {"सुनाई", "suna:i:", "(सुन,sun),(आई,ai:i)"},
          {"बेइज्जती", "berdʒudʒəti:", "(बे,be),(इज्जत,ɪdʒudʒət),(ई,i:i)"},
          {"खाकर", "kʰa:kər", "(खा,kʰa:),(कर,kər)"},
          {"राजकुमारियों", "ra:dʒkuma:rijo:ⁿ", "(राज,ra:dʒ),(कुमारी,kuma:ri:),(यों,jo:ⁿ)"},
      }},
      {"fi", "Finnish", {
          {"talo", "talo", "(talo,talo)"},
          {"talossa", "talossa", "(talo,talo),(ssa,ssa)"},
          {"kirjoista", "kirjoista", "(kirja,kirja),(i,i),(sta,sta)"},
          {"lentokone", "lentokone", "(lento,lento),(kone,kone)"},
          {"ymmärrän", "ymmærræn", "(ymmärrä,ymmærræ),(n,n)"},
          {"opiskelisin", "opiskelisin", "(opiskel,opiskel),(isi,isi),(n,n)"},
          {"työttömyys", "tyøttømyys", "(työ,tyø),(ttömyys,ttømyys)"},
          {"juoksemassa", "juoksemassa", "(juokse,juokse),(ma,ma),(ssa,ssa)"},
          {"kirjassani", "kirjassani", "(kirja,kirja),(ssa,ssa),(ni,ni)"},
          {"kuuntelemattomia", "kuuntelemattomia", "(kuuntele,kuuntele),(ma,ma),(ttom,ttom),(ia,ia)"},
      }},
      {"tr", "Turkish", {
          {"kitap", "kitap", "(kitap,kitap)"},
          {"evler", "evler", "(ev,ev),(ler,ler)"},
          {"geliyorum", "gelijorum", "(gel,gel),(iyor,ijor),(um,um)"},
          {"başbakan", "bafbakan", "(baş,baf),(bakan,bakan)"},
          {"göremeyeceksiniz", "gøremejedzeksiniz", "(gör,gør),(e,e),(me,me),(yecek,jedzek),(siniz,siniz)"},
          {"masadaki", "masadaki", "(masa,masa),(da,da),(ki,ki)"},
          {"çiçekçi", "tʃitʃektʃi", "(çiçek,tʃitʃek),(çi,tʃi)"},
          {"vatandaşlık", "vatandafluk", "(vatan,vatan),(daş,daf),(lık,luk)"},
          {"köprü", "køpry", "(köprü,køpry)"},
          {"konuşanıyordum", "konufamıjordum", "(konuş,konuf),(a,a),(mı,mıı),(yor,jor),(du,du),(m,m)"},
      }},
      {"ta", "Tamil", {
          {"வீடு", "vi:du", "(வீடு,vi:du)"},
          {"புத்தகங்கள்", "puṭṭakəŋgəɻ", "(புத்தகம்,puṭṭakəṁ),(கள்,ga)"},
          {"மரத்தில்", "məɾəṭṭil", "(மரம்,məɾəṁ),(இல்,il)"},
          {"செல்கிறேன்", "selgire:n", "(செல்,sel),(கிற்,gir),(ஏன்,e:n)"},
          {"படிக்கவில்லை", "pəḍikkəvillai", "(படி,pəḍi),(க்க,kkə),(இல்லை,villai)"},
          {"பார்த்துக்கொண்டிருந்தான்", "pa:ṭṭokkoṇḍironda:n", "(பார்,pa:r),(,ṭṭ),(கொண்டு,kkoṇḍ),(இரு,iru),(ன்த,nd),(ஆன்,a:n)"},
          {"நிலச்சரிவு", "niləṭṭəri:v", "(நிலம்,nilə),(சரிவு,ṭṭəri:v)"},
          {"நல்லவர்", "nəlləvəɻ", "(நல்ல,nəllə),(அர்,vəɻ)"},
          {"தமிழ்", "təmi¹", "(தமிழ்,təmi¹)"},
          {"கற்றுக்கொடுத்தார்கள்", "kaṭṭokkoḍṭṭa:rgəɻ", "(கல்,ka),(று,ṭṭ),(கொடு,kkoḍ),(த்,ṭṭ),(ஆர்,a:r),(கள்,ga)"},
      }},
  };
  return sets;
}

}  // namespace iconicity
